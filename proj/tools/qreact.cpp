#include <iostream>

#include "qreact/cli.hpp"

int main(int argc, char **argv) { return qreact::cli::run(argc, argv, std::cout, std::cerr); }
