#include <string>
#include <vector>

#include "sqec/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return sqec::run_command(args);
}
