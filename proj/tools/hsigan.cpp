#include <iostream>
#include <string>
#include <vector>

#include "hsigan/cli/commands.hpp"

int main(int argc, char** argv) {
  return hsigan::cli::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
