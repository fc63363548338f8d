#include <iostream>

#include "sta_cli/cli.hpp"

int main(int argc, char** argv) { return sta::cli::run(argc, argv, std::cout, std::cerr); }
