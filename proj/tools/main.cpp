#include <iostream>

#include "triplet_forge/cli.hpp"

int main(int argc, char** argv) { return triplet_forge::cli::run(argc, argv, std::cout, std::cerr); }
