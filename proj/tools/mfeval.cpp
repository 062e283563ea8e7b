#include <iostream>

#include "mfeval/cli.hpp"

int main(int argc, char** argv) {
    return mfeval::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
