#include <iostream>

#include "infprod/cli.hpp"

int main(int argc, char** argv) { return infprod::cli::run(argc, argv, std::cout, std::cerr); }
