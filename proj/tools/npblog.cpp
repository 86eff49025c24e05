#include "npblog/cli.hpp"

int main(int argc, char** argv) { return npblog::cli::main(argc, argv); }
