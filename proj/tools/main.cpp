#include <iostream>

#include "iwoa/cli.hpp"

int main(int argc, char** argv) { return iwoa::run_cli(argc, argv, std::cout, std::cerr); }
