// Compiles the amalgamated Catch2 implementation (header + source pair
// shipped on the include path) into a static library linked by the suites.
#include <catch2/catch_amalgamated.cpp>
