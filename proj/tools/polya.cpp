#include <iostream>
#include <string>
#include <vector>

#include "polya/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  const polya::cli::CommandOutcome outcome = polya::cli::run(args);
  std::cout << outcome.to_json().dump(2) << std::endl;
  return outcome.exit_code();
}
