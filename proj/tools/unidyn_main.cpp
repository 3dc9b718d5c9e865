#include "unidyn/cli_app.hpp"

int main(int argc, char** argv) { return unidyn::cli::run(argc, argv); }
