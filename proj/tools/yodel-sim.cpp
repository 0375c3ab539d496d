#include "yodel/cli.hpp"

#include <iostream>

int
main(int argc, char** argv)
{
  return yodel::runCli(argc, argv, std::cout, std::cerr);
}
