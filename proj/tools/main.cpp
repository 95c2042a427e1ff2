#include <string>
#include <vector>

#include "auctk/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return auctk::run_cli(args);
}
