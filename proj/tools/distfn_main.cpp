#include <iostream>

#include "distfn/cli.hpp"

int main(int argc, char** argv) {
  return distfn::run_cli(argc, argv, std::cout, std::cerr);
}
