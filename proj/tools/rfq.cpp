#include <iostream>

#include "rfq_commands.hpp"

int main(int argc, char** argv) { return rfq::cli::run(argc, argv, std::cout, std::cerr); }
