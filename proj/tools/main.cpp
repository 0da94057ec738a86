#include "qmimo/cli.hpp"

int main(int argc, char** argv) { return qmimo::run_cli(argc, argv); }
