#include <iostream>

#include "fmc/cli.hpp"

int main(int argc, char** argv) { return fmc::cli::main_entry(argc, argv, std::cout, std::cerr); }
