#include <iostream>

#include "polyprobe/cli.hpp"

int main(int argc, char** argv) {
  return polyprobe::run_cli(argc, argv, std::cout, std::cerr);
}
