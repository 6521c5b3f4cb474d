#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace pforge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRejections = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

struct CommandOutcome {
  int exit_code = kExitOk;
  std::string summary;
  std::vector<std::string> artifacts_written;
};

// `args` excludes the program name: {"generate", "--model", "m.bin", ...}.
// The summary line goes to `out`; usage text and diagnostics go to `err`.
CommandOutcome run(const std::vector<std::string>& args, const std::map<std::string, std::string>& env,
                   std::ostream& out, std::ostream& err);

std::string sha256_hex(const std::string& bytes);

}  // namespace pforge::cli
