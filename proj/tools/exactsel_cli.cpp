#include <iostream>

#include "exactsel/cli.hpp"

int main(int argc, char** argv) { return exactsel::run_cli(argc, argv, std::cout, std::cerr); }
