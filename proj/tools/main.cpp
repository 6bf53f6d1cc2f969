#include <string>
#include <vector>

#include "commands.hpp"

int main(int argc, char** argv) {
    return ismnet::cli::run_command(std::vector<std::string>(argv + 1, argv + argc));
}
