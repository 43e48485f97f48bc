#include "tcsim/cli.hpp"

int main(int argc, char** argv) { return tcsim::run_cli(argc, argv); }
