#include <iostream>

#include "ctxrr/cli/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ctxrr::run_cli(args, std::cin, std::cout, std::cerr);
}
