#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace relkvn::cli {

enum ExitCode { kPass = 0, kCheckFailure = 1, kConfigError = 2, kRuntimeError = 3 };

/// Entry point of the relkvn executable. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace relkvn::cli
