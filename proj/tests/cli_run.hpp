#pragma once

#include <sys/wait.h>

#include <cstdio>
#include <stdexcept>
#include <string>

namespace tilepeps::testing {

struct CliRun {
  int code = -1;
  std::string out;     // stdout only
  std::string result;  // value after the last "RESULT: "
};

/// Runs the CLI with a shell-quoted argument string; `env` is prefixed verbatim.
inline CliRun run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" TILEPEPS_CLI "' " + args + " 2>/dev/null";
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) throw std::runtime_error("popen failed: " + cmd);
  CliRun r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = ::pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  const auto pos = r.out.rfind("RESULT: ");
  if (pos != std::string::npos) {
    const auto end = r.out.find('\n', pos);
    r.result = r.out.substr(pos + 8, end == std::string::npos ? std::string::npos : end - pos - 8);
  }
  return r;
}

inline std::string data_file(const std::string& name) { return std::string(TILEPEPS_DATA_DIR) + "/" + name; }

}  // namespace tilepeps::testing
