#include "mesodpp/cli.hpp"

int main(int argc, char** argv) { return meso::cli::run_cli(argc, argv); }
