#include <iostream>

#include "sturm/cli.hpp"

int main(int argc, char** argv) {
    return sturm::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
