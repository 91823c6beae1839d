#include <iostream>

#include "sockkt/cli.hpp"

int main(int argc, char** argv) { return sockkt::run_cli(argc, argv, std::cout, std::cerr); }
