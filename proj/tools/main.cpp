#include <iostream>

#include "dronecd/cli.hpp"

int main(int argc, char** argv) {
  return dronecd::run_cli(argc, argv, std::cout, std::cerr);
}
