#include <iostream>
#include <string>
#include <vector>

#include "glyphguide_cli/cli.hpp"

int main(int argc, char** argv) {
    return glyphguide::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
