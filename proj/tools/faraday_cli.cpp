#include <iostream>

#include "faraday/cli.hpp"

int main(int argc, char** argv)
{
    return faraday::run_cli(argc, argv, std::cout, std::cerr);
}
