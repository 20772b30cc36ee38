#include "commands.hpp"

#include <iostream>

int main(int argc, char **argv) { return oamsim::cli_main(argc, argv, std::cout, std::cerr); }
