#include "hkt/cli.hpp"

int main(int argc, char** argv) { return hkt::cli::main_entry(argc, argv); }
