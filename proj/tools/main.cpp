#include "breather/cli.hpp"

int main(int argc, char** argv) { return breather::cli::main(argc, argv); }
