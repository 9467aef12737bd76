#include <iostream>
#include <string>
#include <vector>

#include "gentile_lab/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return gentile_lab::cli::run(args, std::cout, std::cerr);
}
