#include <iostream>
#include <string>
#include <vector>

#include "dincl/cli.hpp"

int main(int argc, char** argv)
{
    const std::vector<std::string> args(argv, argv + argc);
    return dincl::cli::run(args, std::cout, std::cerr);
}
