#include <iostream>

#include "superstar/cli.hpp"

int main(int argc, char** argv) {
  return superstar::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
