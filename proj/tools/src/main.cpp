#include "kellystop/cli/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return kellystop::cli::run(argc, argv, std::cout, std::cerr); }
