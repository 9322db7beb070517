#include <iostream>

#include "artisim/cli.hpp"

int main(int argc, char** argv) { return artisim::run_cli(argc, argv, std::cout, std::cerr); }
