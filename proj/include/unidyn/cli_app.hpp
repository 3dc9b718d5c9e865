#ifndef UNIDYN_CLI_APP_HPP
#define UNIDYN_CLI_APP_HPP

#include <string>
#include <vector>

// Command-line front end. Exit codes: 0 success, 2 validation failure,
// 3 solver/runtime failure.

namespace unidyn::cli {

int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

}  // namespace unidyn::cli

#endif
