#include <iostream>

#include "itact/cli.hpp"

int main(int argc, char** argv) { return itact::run(argc, argv, std::cout, std::cerr); }
