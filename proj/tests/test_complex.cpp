#include <doctest.h>
TEST_CASE("placeholder test_complex") { CHECK(true); }
