#include <iostream>
#include <string>
#include <vector>

#include "nl2spatial/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return nl2spatial::run_cli(args, std::cout, std::cerr);
}
