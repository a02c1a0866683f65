#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace ghcb::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kIo = 3 };

/// Entry point shared by the executable and the CLI tests.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Flat key=value document; '#' starts a comment. Duplicate keys are rejected.
std::map<std::string, std::string> parse_config_text(const std::string& text);

}  // namespace ghcb::cli
