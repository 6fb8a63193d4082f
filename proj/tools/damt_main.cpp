#include <string>
#include <vector>

#include "damt/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return damt::cli::run(args);
}
