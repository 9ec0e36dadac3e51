#include "coarsehom/cli.hpp"

int main(int argc, char** argv) { return coarsehom::cli_main(argc, argv); }
