#include <iostream>

#include "hankelbands/cli.hpp"

int main(int argc, char** argv) { return hankelbands::cli::run(argc, argv, std::cout, std::cerr); }
