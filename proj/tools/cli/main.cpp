#include "cli.hpp"

int main(int argc, char** argv) { return iclef::cli::run(argc, argv); }
