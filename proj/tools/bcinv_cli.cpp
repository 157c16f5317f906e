#include <iostream>

#include "bcinv/cli.hpp"

int main(int argc, char** argv) { return bcinv::cli::main(argc, argv, std::cerr); }
