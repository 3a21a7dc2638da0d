#include <iostream>

#include "qfnn/cli.hpp"

int main(int argc, char** argv) {
    return qfnn::run_cli(argc, argv, std::cout, std::cerr);
}
