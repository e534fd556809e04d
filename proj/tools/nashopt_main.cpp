#include "nashopt/harness.hpp"

#include <iostream>

int main(int argc, char** argv) { return nashopt::harness::run_cli(argc, argv, std::cout, std::cerr); }
