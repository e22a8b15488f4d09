#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace berezin_lab {

// exit codes: 0 ok, 1 validation error, 2 numerical failure
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace berezin_lab
