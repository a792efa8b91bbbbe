#include <iostream>
#include <string>
#include <vector>

#include "quadint/cli.hpp"

int main(int argc, char** argv) {
  return quadint::cli::parse_and_dispatch(
      std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
