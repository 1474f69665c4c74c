#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace helmex::cli {

/// Exit-code contract: 0 success, 1 runtime failure, 2 usage/config
/// error. Subcommands: simulate, distill, explain, evaluate.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main_entry(int argc, char** argv);

}  // namespace helmex::cli
