#include "cli.hpp"

int main(int argc, char** argv) { return edgeimp::cli::run(argc, argv); }
