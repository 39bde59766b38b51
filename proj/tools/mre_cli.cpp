#include "mre/cli_runner.hpp"

int main(int argc, char** argv) { return mre::cli::run_cli(argc, argv); }
