#include <iostream>

#include "varietal/cli.hpp"

int main(int argc, char** argv) { return varietal::cli::run(argc, argv, std::cout, std::cerr); }
