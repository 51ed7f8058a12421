#include <iostream>

#include "slc/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return slc::run_cli(args, std::cout, std::cerr);
}
