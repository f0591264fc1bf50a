// safefc: run and compare frequency-control scenarios.

#include "safefc/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return safefc::cli::main(argc, argv, std::cout, std::cerr);
}
