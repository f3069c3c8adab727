#include <doctest.h>
TEST_CASE("placeholder test_digger") { CHECK(true); }
