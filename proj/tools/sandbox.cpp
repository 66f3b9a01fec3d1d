#include "sandbox/cli/cli.hpp"

int main(int argc, char** argv) { return sandbox::cli::run_cli(argc, argv); }
