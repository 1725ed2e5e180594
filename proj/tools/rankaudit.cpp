#include "rankaudit/cli.hpp"

int main(int argc, char** argv) { return rankaudit::run(argc, argv); }
