#include "nfield/cli.hpp"

int main(int argc, char** argv) { return nfield::run(argc, argv); }
