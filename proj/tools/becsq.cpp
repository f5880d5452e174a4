#include <iostream>

#include "becsq/cli/app.hpp"

int main(int argc, char** argv) { return becsq::cli::run(argc, argv, std::cout, std::cerr); }
