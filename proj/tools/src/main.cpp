#include "ltlshape/cli.hpp"

#include <iostream>

int main(int argc, char **argv) { return ltlshape::cli::run(argc, argv, std::cout, std::cerr); }
