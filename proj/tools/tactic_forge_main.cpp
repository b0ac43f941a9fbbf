#include "tactic_forge/cli.hpp"

int main(int argc, char** argv) { return tactic_forge::cli::run(argc, argv); }
