#include <iostream>
#include <string>
#include <vector>

#include "gw/orchestrator.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return gw::run_cli(args, std::cout, std::cerr);
}
