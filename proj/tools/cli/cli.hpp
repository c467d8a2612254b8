#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace iclef::cli {

/// Exit codes: 0 success, 1 task error, 2 usage error. Failures print one
/// JSON object {"error", "message"} to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace iclef::cli
