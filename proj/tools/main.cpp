#include <iostream>

#include "litsearch/cli.hpp"

int main(int argc, char** argv) { return litsearch::cli::run(argc, argv, std::cout, std::cerr); }
