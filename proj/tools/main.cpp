#include "cli.hpp"

int main(int argc, char** argv) { return algpath::cli::run(argc, argv); }
