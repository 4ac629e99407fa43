#include <iostream>

#include "nhsense/cli.hpp"

int main(int argc, char** argv) { return nhsense::cli::run(argc, argv, std::cout, std::cerr); }
