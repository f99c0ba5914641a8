#include "cli.hpp"

int main(int argc, char** argv) { return l0qubo::cli::run_cli(argc, argv, std::cout, std::cerr); }
