#include <iostream>
#include <string>
#include <vector>

#include "xorgame/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return xorgame::cli::run(args, std::cerr);
}
