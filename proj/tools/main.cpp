#include "cli.hpp"

int main(int argc, char** argv) { return gasfc::cli_main(argc, argv); }
