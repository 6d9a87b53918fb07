#include <iostream>

#include "soctat/cli.hpp"

int main(int argc, char** argv) {
  return soctat::run_cli(argc, argv, std::cout, std::cerr);
}
