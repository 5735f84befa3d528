#include <iostream>

#include "aerostp/cli.hpp"

int main(int argc, char** argv) { return aerostp::run_cli(argc, argv, std::cout, std::cerr); }
