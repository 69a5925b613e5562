#include "chb/cli.hpp"

int main(int argc, char** argv) { return chb::cli_main(argc, argv); }
