#include <string>
#include <vector>

#include "volnmf/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return volnmf::cli::run(std::move(args));
}
