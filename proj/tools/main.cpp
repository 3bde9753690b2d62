#include <iostream>

#include "gkdv/cli.hpp"

int main(int argc, char** argv) { return gkdv::run(argc, argv, std::cout, std::cerr); }
