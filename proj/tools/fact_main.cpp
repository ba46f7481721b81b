#include <iostream>
#include <string>
#include <vector>

#include "fact/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return fact::cli::run(args, std::cout, std::cerr);
}
