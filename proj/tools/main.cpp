#include "relaxsoh/cli.hpp"

#include <string>
#include <vector>

int main(int argc, char** argv) {
    return relaxsoh::cli_run(std::vector<std::string>(argv + 1, argv + argc));
}
