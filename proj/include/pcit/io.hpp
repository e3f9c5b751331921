#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcit/permutation.hpp"
#include "pcit/simulation.hpp"
#include "pcit/transform.hpp"

namespace pcit {

/// Digoxin clearance data for 35 heart-failure patients (Halkin et al., 1975):
/// x = creatinine clearance, y = digoxin clearance (ml/min/1.73m^2),
/// z = urine flow (ml/min).
Sample digoxin_dataset();

struct ColumnNames {
  std::string x = "x";
  std::string y = "y";
  std::string z = "z";
};

/// Header row required; columns located by name, extra columns ignored.
/// Errors carry the source name, line and column.
Sample parse_sample_csv(std::istream& in, const ColumnNames& columns = {},
                        const std::string& source = "<stream>");
Sample load_csv(const std::filesystem::path& path, const ColumnNames& columns = {});

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

void write_sample_csv(std::ostream& out, const Sample& sample);
/// Columns x,u,v.
void write_pseudo_csv(std::ostream& out, const Sample& source, const PseudoSample& pseudo);
/// Reads the x,u,v layout back; x is returned in `xs`.
CopulaPairs read_pseudo_csv(std::istream& in, std::vector<double>* xs = nullptr);

/// Columns rho,n,lambda,bandwidth,statistic,conditional_rate,
/// unconditional_rate,replications,resamples.
void write_rejection_csv(std::ostream& out, const RejectionTable& table);
RejectionTable read_rejection_csv(std::istream& in);

nlohmann::json to_json(const EstimatorConfig& config);
nlohmann::json to_json(const TestResult& result);
nlohmann::json to_json(const RejectionTable& table);

}  // namespace pcit
