#include <iostream>

#include "gridlint/cli.hpp"

int main(int argc, char** argv) {
  return gridlint::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
