#include <iostream>
#include <vector>

#include <vermakit/cli.hpp>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return vermakit::run_cli(args, std::cout, std::cerr);
}
