// Builds the amalgamated Catch2 once for every test target.
#include <catch2/catch_amalgamated.cpp>
