#include "korselt/cli.hpp"

int main(int argc, char** argv) { return korselt::cli::run(argc, argv); }
