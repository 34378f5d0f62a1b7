#include <iostream>

#include "segscore/cli.hpp"

int main(int argc, char** argv) {
  return segscore::cli::dispatch(argc, argv, std::cout, std::cerr);
}
