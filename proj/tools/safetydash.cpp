#include "safetydash/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return safetydash::run_cli(argc, argv, std::cout, std::cerr); }
