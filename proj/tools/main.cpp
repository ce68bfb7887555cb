// Command-line front end; subcommands are registered in cli_commands.cpp as
// the corresponding library modules land.

#include <iostream>

#include "qaffine/algebra.hpp"

int main(int argc, char** argv) {
  (void)argc;
  (void)argv;
  std::cout << "qaffine: subcommands pending\n";
  return 0;
}
