#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ugc::cli {

enum Exit { kOk = 0, kInputError = 1, kCheckFailed = 2, kResourceCap = 3 };

/// Runs one `ugc` invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ugc::cli
