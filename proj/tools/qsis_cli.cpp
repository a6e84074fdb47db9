#include "qsis/harness.hpp"

int main(int argc, char** argv) { return qsis::cli_main(argc, argv); }
