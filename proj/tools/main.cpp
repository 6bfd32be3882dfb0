#include <iostream>

#include "topdown/cli.hpp"

int main(int argc, char** argv) { return topdown::cli::run(argc, argv, std::cout, std::cerr); }
