#include "spectral/cli.hpp"

int main(int argc, char** argv) { return spectral::run_cli(argc, argv); }
