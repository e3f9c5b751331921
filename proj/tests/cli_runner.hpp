#pragma once

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <string>

namespace pcit::testing {

struct CliResult {
  int status = -1;
  std::string out;  // stdout only; stderr is discarded unless redirected in args
};

inline CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(PCIT_CLI_PATH) + " " + args;
  CliResult result;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) return result;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) result.out.append(buf.data(), got);
  const int raw = ::pclose(pipe);
  result.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return result;
}

}  // namespace pcit::testing
