#include "regcap/cli.hpp"

int main(int argc, char** argv) { return regcap::cli::run(argc, argv); }
