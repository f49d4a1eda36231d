#include <iostream>

#include "ssl/cli.hpp"

int main(int argc, char** argv) {
    return ssl::cli_main(argc, argv, std::cout, std::cerr);
}
