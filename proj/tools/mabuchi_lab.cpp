#include "mabuchi/cli.hpp"

int main(int argc, char** argv) { return mabuchi::run_command(argc, argv); }
