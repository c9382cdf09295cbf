#include "varjet/cli.hpp"

int main(int argc, char** argv) { return varjet::cli::run(argc, argv); }
