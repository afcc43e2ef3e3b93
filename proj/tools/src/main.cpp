#include <iostream>

#include "satkit_cli/cli.hpp"

int main(int argc, char** argv) { return satkit::cli::run(argc, argv, std::cout, std::cerr); }
