#include <iostream>

#include "symdiff/cli/cli.hpp"

int main(int argc, char** argv) { return symdiff::cli::run(argc, argv, std::cout, std::cerr); }
