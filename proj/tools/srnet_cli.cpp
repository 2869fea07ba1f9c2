#include <iostream>
#include <string>
#include <vector>

#include "srnet/pipeline.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return srnet::cli_dispatch(args, std::cout, std::cerr);
}
