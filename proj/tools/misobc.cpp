#include "misobc/cli.hpp"

int main(int argc, char** argv) { return misobc::run_cli(argc, argv); }
