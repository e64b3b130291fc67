#include <iostream>

#include "evtrust/cli.hpp"

int main(int argc, char** argv) { return evtrust::cli_main(argc, argv, std::cout, std::cerr); }
