#include <iostream>

#include "flowmon/cli.hpp"

int main(int argc, char** argv) { return flowmon::run_cli(argc, argv, std::cout, std::cerr); }
