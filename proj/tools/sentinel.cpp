#include "sentinel/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return sentinel::run_cli(argc, argv, std::cout, std::cerr); }
