#include <iostream>

#include "nvlab_cli/commands.hpp"

int main(int argc, char** argv) { return nvlab::cli::run_cli(argc, argv, std::cout, std::cerr); }
