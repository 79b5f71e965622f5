#include <iostream>

#include "hojman/cli/commands.hpp"

int main(int argc, char** argv) { return hojman::cli::run_cli(argc, argv, std::cout, std::cerr); }
