#include <iostream>

#include "tailbounds/cli.hpp"

int main(int argc, char** argv) {
  return tailbounds::cli::dispatch(argc, argv, std::cout, std::cerr);
}
