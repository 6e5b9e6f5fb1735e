#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cdnet::cli {

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name. Returns 0 on success; on any error writes a one-line
/// diagnostic to `err` and returns non-zero.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cdnet::cli
