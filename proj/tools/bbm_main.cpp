#include "bbmabs/cli.hpp"

int main(int argc, char** argv) { return bbmabs::cli::run_cli(argc, argv); }
