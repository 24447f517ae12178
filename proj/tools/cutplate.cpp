#include "cutplate/cli.hpp"

int main(int argc, char** argv) { return cutplate::cli::main(argc, argv); }
