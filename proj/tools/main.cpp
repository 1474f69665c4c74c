#include "helmex/cli.hpp"

int main(int argc, char** argv) { return helmex::cli::main_entry(argc, argv); }
