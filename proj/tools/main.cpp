#include <iostream>

#include "socialsim/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return socialsim::run_cli(args, std::cout, std::cerr, std::cin);
}
