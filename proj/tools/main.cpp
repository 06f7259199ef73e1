#include <iostream>

#include "odontoceti/harness.hpp"

int main(int argc, char** argv) { return odon::run_cli(argc, argv, std::cout, std::cerr); }
