#include <iostream>

#include "mintrace/cli.hpp"

int main(int argc, char** argv) { return mintrace::run_cli(argc, argv, std::cout, std::cerr); }
