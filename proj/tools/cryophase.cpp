#include "cryophase/cli.hpp"

#include <iostream>

int main(int argc, char **argv) {
  return cryophase::run_cli(argc, argv, std::cout, std::cerr);
}
