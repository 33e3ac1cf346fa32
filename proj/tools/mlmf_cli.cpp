#include "mlmf/cli.hpp"

int main(int argc, char** argv) { return mlmf::run_cli(argc, argv); }
