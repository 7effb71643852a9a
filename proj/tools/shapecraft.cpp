// SPDX-License-Identifier: Apache-2.0
#include "shapecraft/cli/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return shapecraft::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
