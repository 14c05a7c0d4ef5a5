#include <string>
#include <vector>

#include "micol/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return micol::cli::run(args);
}
