#include <iostream>

#include "qphonon/cli.hpp"

int main(int argc, char** argv) { return qphonon::cli::run(argc, argv, std::cout, std::cerr); }
