#include <iostream>

#include "seirctl/cli/app.hpp"

int main(int argc, char** argv) { return seirctl::cli::run(argc, argv, std::cout, std::cerr); }
