#include "cli.hpp"

int main(int argc, char** argv) { return evonet::cli::run(argc, argv); }
