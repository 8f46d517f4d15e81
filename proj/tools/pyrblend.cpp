#include <iostream>

#include "pyrblend/commands.hpp"

int main(int argc, char** argv) { return pyrblend::cli::run(argc, argv, std::cout, std::cerr); }
