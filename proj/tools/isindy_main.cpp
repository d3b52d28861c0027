#include "isindy/cli.hpp"

int main(int argc, char** argv) { return isindy::cli::run(argc, argv); }
