#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ppud {

// Exit codes: 0 definitive answer, 1 property violated / non-empty
// counterexample, 2 inconclusive (budget), 3 input error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ppud
