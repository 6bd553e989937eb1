#include <iostream>

#include "collusion/cli.hpp"

int main(int argc, char** argv) {
    return collusion::cli::run(argc, argv, std::cout, std::cerr);
}
