#include <iostream>

#include "cgfact/cli/commands.hpp"

int main(int argc, char** argv) { return cgfact::cli::run(argc, argv, std::cout, std::cerr); }
