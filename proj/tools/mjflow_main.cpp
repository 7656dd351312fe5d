#include <iostream>

#include "mjflow/cli.hpp"

int main(int argc, char** argv) { return mjflow::cli::run(argc, argv, std::cout, std::cerr); }
