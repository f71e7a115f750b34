#include <string>
#include <vector>

#include "tpn/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return tpn::cli_main(std::move(args));
}
