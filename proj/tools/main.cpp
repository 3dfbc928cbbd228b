#include "hypofrac/cli.hpp"

int main(int argc, char** argv) { return hypofrac::cli::dispatch(argc, argv); }
