#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace seamforge {

/// Runs the command line front end. Returns 0 on success, 1 on runtime
/// failures and 2 on usage errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace seamforge
