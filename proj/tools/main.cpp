#include <string>
#include <vector>

#include "hyptest/experiment.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hyptest::cli_main(args);
}
