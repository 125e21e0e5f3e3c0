#include "zerodist/cli.hpp"

int main(int argc, char** argv) { return zerodist::cli::main(argc, argv); }
