#include "fairpol/cli.hpp"

int main(int argc, char** argv) { return fairpol::run_cli_main(argc, argv); }
