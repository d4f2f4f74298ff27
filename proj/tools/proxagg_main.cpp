#include "proxagg/cli.hpp"

int main(int argc, char** argv) { return proxagg::cli_main(argc, argv); }
