#include <iostream>

#include "twistring/cli_io.hpp"

int main(int argc, char** argv) { return twistring::run_cli(argc, argv, std::cout, std::cerr); }
