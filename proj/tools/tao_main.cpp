#include <iostream>

#include "tao/cli.hpp"

int main(int argc, char** argv) { return tao::cli::main(argc, argv, std::cout, std::cerr); }
