#include "combsum/cli.hpp"

int main(int argc, char** argv) { return combsum::cli::run(argc, argv); }
