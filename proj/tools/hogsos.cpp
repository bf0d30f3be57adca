#include <iostream>

#include "hogsos/cli.hpp"

int main(int argc, char** argv) { return hogsos::cli::main(argc, argv, std::cout, std::cerr); }
