#include <iostream>
#include <string>
#include <vector>

#include "dqhelmert_cli/commands.hpp"

int main(int argc, char** argv) {
  return dqhelmert::cli::Run(std::vector<std::string>(argv + 1, argv + argc), std::cout,
                             std::cerr);
}
