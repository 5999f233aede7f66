#include <iostream>
#include <string>
#include <vector>

#include "fkm/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return fkm::run(args, std::cout, std::cerr);
}
