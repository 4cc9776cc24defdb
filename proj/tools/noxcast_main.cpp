#include "noxcast/cli.hpp"

int main(int argc, char** argv) { return noxcast::cli::run(argc, argv); }
