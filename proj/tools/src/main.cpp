#include <iostream>
#include <string>
#include <vector>

#include "kldproj_cli/app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return kldproj::cli::run(args, std::cout, std::cerr);
}
