#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return relumax::cli::dispatch(argc, argv, std::cout, std::cerr); }
