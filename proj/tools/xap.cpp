#include <iostream>

#include "xap/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return xap::cli::run(args, std::cout, std::cerr);
}
