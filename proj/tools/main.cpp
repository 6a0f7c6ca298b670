#include "surge/cli.hpp"

int main(int argc, char** argv) { return surge::cli_main(argc, argv); }
