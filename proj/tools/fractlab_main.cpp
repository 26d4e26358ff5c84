#include <iostream>
#include <string>
#include <vector>

#include "fractlab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return fractlab::run_cli(args, std::cout, std::cerr);
}
