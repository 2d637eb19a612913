#include "xilab/cli.hpp"

int main(int argc, char** argv) { return xilab::cli_main(argc, argv); }
