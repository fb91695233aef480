#include <iostream>

#include "snn/cli.hpp"

int main(int argc, char** argv) { return snn::run_cli(argc, argv, std::cout, std::cerr); }
