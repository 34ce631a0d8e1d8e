#include "pseudorain/cli.hpp"

int main(int argc, char** argv) { return pseudorain::run_cli(argc, argv); }
