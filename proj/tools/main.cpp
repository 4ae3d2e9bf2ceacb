#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return spm::cli_main(argc, argv, std::cout, std::cerr);
}
