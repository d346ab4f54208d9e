#include <string>
#include <vector>

#include "cxg/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cxg::dispatch(args);
}
