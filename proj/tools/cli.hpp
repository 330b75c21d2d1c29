#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rdcli {

// Runs one command line (args[0] is the program name). Exit status: 0 success,
// 1 usage error, 2 mathematical failure (including a FAIL verdict).
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace rdcli
