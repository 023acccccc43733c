#include <string>
#include <vector>

#include "spinmag/scenarios.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return spinmag::scenarios::run_cli(args);
}
