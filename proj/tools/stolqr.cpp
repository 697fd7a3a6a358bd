#include <iostream>

#include "stolqr/cli.hpp"

int main(int argc, char** argv) { return stolqr::run_cli(argc, argv, std::cout, std::cerr); }
