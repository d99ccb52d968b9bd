#ifndef LOWDIM_CLI_HPP
#define LOWDIM_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace lowdim::cli {

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name. Returns the process exit code (0 iff no error surfaced).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace lowdim::cli

#endif
