#include <iostream>
#include <string>
#include <vector>

#include "wordify/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return wordify::run_cli(args, std::cout, std::cerr);
}
