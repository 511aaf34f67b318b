#include "cli.hpp"

int main(int argc, char** argv) { return refshape::cli::run(argc, argv); }
