#include "rlw/cli.hpp"

int main(int argc, char** argv) { return rlw::run_cli(argc, argv); }
