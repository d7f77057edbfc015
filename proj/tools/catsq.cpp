#include <iostream>

#include "catsq/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return catsq::cli::run(args, std::cout, std::cerr);
}
