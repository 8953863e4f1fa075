#include <iostream>

#include "holocorr/cli.hpp"

int main(int argc, char** argv) { return holocorr::cli::run(argc, argv, std::cout, std::cerr); }
