#include "lextopic/cli.hpp"

int main(int argc, char** argv) { return lextopic::cli::run(argc, argv); }
