#include <iostream>
#include <string>
#include <vector>

#include "tsqm/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return tsqm::cli::run(args, std::cout, std::cerr);
}
