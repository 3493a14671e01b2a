#include <iostream>
#include <string>
#include <vector>

#include "keller_cli.hpp"

int main(int argc, char **argv) {
  std::vector<std::string> args(argv, argv + argc);
  return keller::cli::main_entry(args, std::cout, std::cerr);
}
