#include "cli.hpp"

int main(int argc, char** argv) { return kfp::cli_main(argc, argv); }
