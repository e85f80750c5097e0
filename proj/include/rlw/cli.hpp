#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rlw {

// Exit codes: 0 ok, 1 error or failed verification, 2 no admissible surface, 3 malformed profile file.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace rlw
