#include "nvstrain/cli.hpp"

int main(int argc, char** argv) { return nvstrain::cli::run(argc, argv); }
