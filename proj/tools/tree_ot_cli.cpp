#include <iostream>

#include "tree_ot/cli.hpp"

int main(int argc, char** argv) { return tree_ot::cli::run_cli(argc, argv, std::cout, std::cerr); }
