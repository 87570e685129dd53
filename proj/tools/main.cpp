#include <string>
#include <vector>

#include "hardy/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return hardy::cli::run_cli(std::move(args));
}
