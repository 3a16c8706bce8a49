#include "cli.hpp"

int main(int argc, char** argv) { return dropwarp::cli::run_cli(argc, argv, std::cout, std::cerr); }
