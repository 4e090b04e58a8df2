#include <iostream>

#include "aspectlab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return aspectlab::run_cli(args, std::cout, std::cerr);
}
