#include <iostream>
#include <string>
#include <vector>

#include "kaclab/commands.hpp"

int main(int argc, char** argv)
{
  const std::vector<std::string> args(argv + 1, argv + argc);
  return kaclab::run_cli(args, std::cout, std::cerr);
}
