#include <iostream>

#include "epx/cli.hpp"

int main(int argc, char** argv)
{
    return epx::run_cli(argc, argv, std::cout, std::cerr);
}
