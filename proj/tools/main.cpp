#include "hcopt/cli.hpp"

int main(int argc, char** argv) { return hcopt::run_cli(argc, argv); }
