#include "dpmis/cli.hpp"

int main(int argc, char** argv) { return dpmis::run_cli(argc, argv); }
