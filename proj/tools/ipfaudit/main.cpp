#include "ipfaudit/cli.hpp"

int main(int argc, char** argv) { return ipfaudit::run_cli(argc, argv); }
