#include <iostream>

#include "topolidar/cli.hpp"

int main(int argc, char** argv) {
  return topolidar::cli::run(argc, argv, std::cout, std::cerr);
}
