#include <iostream>

#include "ultratext/cli.h"

int main(int argc, char** argv) {
  return ultratext::run_command(argc, argv, std::cout, std::cerr);
}
