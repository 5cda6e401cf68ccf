#include <iostream>

#include "kaczmarz/commands.hpp"

int main(int argc, char** argv)
{
    return kaczmarz::run_cli(argc, argv, std::cout, std::cerr);
}
