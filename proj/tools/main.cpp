#include <vector>

#include "gacl/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gacl::cli::main_from(args);
}
