#include <iostream>
#include <string>
#include <vector>

#include "noether_qds/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return noether::cli::run(args, std::cout, std::cerr);
}
