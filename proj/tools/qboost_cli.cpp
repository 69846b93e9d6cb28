#include "qboost/harness/cli.hpp"

int main(int argc, char** argv) { return qboost::harness::cli_main(argc, argv); }
