#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dynframe::cli {

/// Exit codes: 0 computed and every check passed, 1 computed with a failed
/// check or verdict, 2 usage or input error. A JSON report is written on 0
/// and 1.
enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2 };

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dynframe::cli
