#include "pcit/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "pcit/error.hpp"

namespace pcit {

namespace {

// Printed as three column groups; concatenated group by group.
constexpr std::array<Observation, 35> kDigoxin{{
    {19.5, 17.5, 0.74},   {24.7, 34.8, 0.43},  {26.5, 11.4, 0.11},  {31.1, 29.3, 1.48},
    {31.3, 13.9, 0.97},   {31.8, 31.6, 1.12},  {34.1, 20.7, 1.77},  {36.6, 34.1, 0.70},
    {42.4, 25.0, 0.93},   {42.8, 47.4, 2.50},  {44.2, 31.8, 0.89},  {49.7, 36.1, 0.52},
    {51.3, 22.7, 0.33},   {55.0, 30.7, 0.80},  {55.9, 42.5, 1.02},  {61.2, 42.4, 0.56},
    {63.1, 61.1, 0.93},   {63.7, 38.2, 0.44},  {66.8, 37.5, 0.50},  {72.4, 50.1, 0.97},
    {80.9, 50.2, 1.02},   {82.0, 50.0, 0.95},  {82.7, 31.8, 0.76},  {87.9, 55.4, 1.06},
    {101.5, 110.6, 1.38}, {105.0, 114.4, 1.85}, {110.5, 69.3, 2.25}, {114.2, 84.8, 1.76},
    {117.8, 63.9, 1.60},  {122.6, 76.1, 0.88}, {127.9, 112.8, 1.70}, {135.6, 82.2, 0.98},
    {136.0, 46.8, 0.94},  {153.5, 137.7, 1.76}, {201.1, 76.1, 0.87},
}};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool parse_number(std::string_view text, double& value) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  return ec == std::errc() && ptr == end && !text.empty();
}

bool blank(std::string_view line) { return trim(line).empty(); }

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
};

// Reads a header line and the named numeric columns.
Table read_columns(std::istream& in, const std::vector<std::string>& wanted,
                   const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (!have_header && std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
      line.erase(0, 3);
    }
    have_header = !blank(line);
  }
  if (!have_header) fail(ErrorCode::parse_error, source + ": empty file");

  Table table;
  for (auto f : split(line)) table.header.emplace_back(f);
  std::vector<std::size_t> index;
  for (const auto& name : wanted) {
    const auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) {
      fail(ErrorCode::missing_column, source + ": missing column \"" + name + "\"");
    }
    index.push_back(static_cast<std::size_t>(it - table.header.begin()));
  }
  table.columns.resize(wanted.size());
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto fields = split(line);
    for (std::size_t c = 0; c < wanted.size(); ++c) {
      const std::string where =
          source + ":" + std::to_string(line_no) + ": column \"" + wanted[c] + "\"";
      if (index[c] >= fields.size() || fields[index[c]].empty()) {
        fail(ErrorCode::parse_error, where + " is missing a value");
      }
      double value = 0.0;
      if (!parse_number(fields[index[c]], value)) {
        fail(ErrorCode::parse_error,
             where + " is not numeric: \"" + std::string(fields[index[c]]) + "\"");
      }
      table.columns[c].push_back(value);
    }
  }
  if (table.columns.front().empty()) fail(ErrorCode::parse_error, source + ": no data rows");
  return table;
}

}  // namespace

Sample digoxin_dataset() { return Sample(kDigoxin); }

Sample parse_sample_csv(std::istream& in, const ColumnNames& columns, const std::string& source) {
  Table t = read_columns(in, {columns.x, columns.y, columns.z}, source);
  for (std::size_t i = 0; i < t.columns[0].size(); ++i) {
    for (std::size_t c = 0; c < 3; ++c) {
      if (!std::isfinite(t.columns[c][i])) {
        fail(ErrorCode::parse_error, source + ": data row " + std::to_string(i + 1) +
                                         " has a non-finite value");
      }
    }
  }
  return Sample(std::move(t.columns[0]), std::move(t.columns[1]), std::move(t.columns[2]));
}

Sample load_csv(const std::filesystem::path& path, const ColumnNames& columns) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_error, "cannot open " + path.string());
  return parse_sample_csv(in, columns, path.string());
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) fail(ErrorCode::io_error, "cannot format number");
  return std::string(buf.data(), ptr);
}

void write_sample_csv(std::ostream& out, const Sample& sample) {
  out << "x,y,z\n";
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto r = sample.row(i);
    out << format_double(r.x) << ',' << format_double(r.y) << ',' << format_double(r.z) << '\n';
  }
}

void write_pseudo_csv(std::ostream& out, const Sample& source, const PseudoSample& pseudo) {
  if (source.size() != pseudo.size()) {
    fail(ErrorCode::invalid_argument, "sample and pseudo-sample differ in length");
  }
  out << "x,u,v\n";
  for (std::size_t i = 0; i < pseudo.size(); ++i) {
    out << format_double(source.xs()[i]) << ',' << format_double(pseudo.u[i]) << ','
        << format_double(pseudo.v[i]) << '\n';
  }
}

CopulaPairs read_pseudo_csv(std::istream& in, std::vector<double>* xs) {
  Table t = read_columns(in, {"x", "u", "v"}, "<pseudo>");
  if (xs) *xs = std::move(t.columns[0]);
  return CopulaPairs{std::move(t.columns[1]), std::move(t.columns[2])};
}

void write_rejection_csv(std::ostream& out, const RejectionTable& table) {
  out << "rho,n,lambda,bandwidth,statistic,conditional_rate,unconditional_rate,"
         "replications,resamples\n";
  for (const auto& r : table.rows) {
    out << format_double(r.rho) << ',' << r.n << ',' << format_double(r.lambda) << ','
        << format_double(r.bandwidth) << ',' << to_string(r.statistic) << ','
        << format_double(r.conditional_rate) << ',' << format_double(r.unconditional_rate)
        << ',' << r.replications << ',' << r.resamples << '\n';
  }
}

RejectionTable read_rejection_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) fail(ErrorCode::parse_error, "<rejection>: empty file");
  RejectionTable table;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto f = split(line);
    if (f.size() != 9) {
      fail(ErrorCode::parse_error, "<rejection>:" + std::to_string(line_no) + ": expected 9 fields");
    }
    RejectionRow r;
    double n = 0, reps = 0, b = 0;
    const bool ok = parse_number(f[0], r.rho) && parse_number(f[1], n) &&
                    parse_number(f[2], r.lambda) && parse_number(f[3], r.bandwidth) &&
                    parse_number(f[5], r.conditional_rate) &&
                    parse_number(f[6], r.unconditional_rate) && parse_number(f[7], reps) &&
                    parse_number(f[8], b);
    if (!ok) fail(ErrorCode::parse_error, "<rejection>:" + std::to_string(line_no) + ": bad value");
    r.statistic = f[4] == "custom" ? StatisticKind::custom
                                   : parse_statistic_kind(std::string(f[4]));
    r.n = static_cast<std::size_t>(n);
    r.replications = static_cast<std::uint64_t>(reps);
    r.resamples = static_cast<std::uint64_t>(b);
    table.rows.push_back(r);
  }
  return table;
}

nlohmann::json to_json(const EstimatorConfig& config) {
  nlohmann::json j;
  j["kernel"] = to_string(config.kernel().shape());
  j["bandwidth_y"] = config.bandwidth_y().value();
  j["bandwidth_z"] = config.bandwidth_z().value();
  j["rule"] = to_string(config.rule());
  if (config.lambda()) j["lambda"] = *config.lambda();
  j["leave_one_out"] = config.leave_one_out();
  return j;
}

nlohmann::json to_json(const TestResult& r) {
  nlohmann::json j;
  j["statistic"] = r.statistic;
  j["estimator"] = to_string(r.estimator);
  j["sided"] = to_string(r.sidedness);
  j["observed"] = r.observed;
  j["p_value"] = r.p_value;
  j["exceedances"] = r.exceedances;
  j["resamples"] = r.resamples;
  j["mode"] = to_string(r.mode);
  j["seed"] = r.seed;
  j["n"] = r.n;
  j["config"] = r.config ? to_json(*r.config) : nlohmann::json();
  return j;
}

nlohmann::json to_json(const RejectionTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows) {
    rows.push_back({{"rho", r.rho},
                    {"n", r.n},
                    {"lambda", r.lambda},
                    {"bandwidth", r.bandwidth},
                    {"statistic", to_string(r.statistic)},
                    {"conditional_rate", r.conditional_rate},
                    {"unconditional_rate", r.unconditional_rate},
                    {"replications", r.replications},
                    {"resamples", r.resamples}});
  }
  return rows;
}

}  // namespace pcit
