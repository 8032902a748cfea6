#include <iostream>

#include "l2disc_cli/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  const auto result = l2disc::cli::run(args, std::cerr);
  std::cout << result.payload;
  return result.exit_code;
}
