#include <iostream>

#include "uqf/cli.hpp"

int main(int argc, char** argv) {
    return uqf::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
