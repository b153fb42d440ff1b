#include <iostream>
#include <string>
#include <vector>

#include "nahm/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return nahm::run_cli(args, std::cout, std::cerr);
}
