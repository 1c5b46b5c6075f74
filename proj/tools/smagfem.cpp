#include "smagfem/cli.hpp"

int main(int argc, char** argv) { return smagfem::cli_main(argc, argv); }
