#include <doctest.h>

#include "spinetor/exact.hpp"

using namespace spinetor;

TEST_CASE("integer wrapper basics") {
    Int a(6), b(-4);
    CHECK(a + b == Int(2));
    CHECK(a * b == Int(-24));
    CHECK(Int::gcd(a, b) == Int(2));
    CHECK(Int::divexact(Int(-24), Int(6)) == Int(-4));
    CHECK(Int::fdiv_q(Int(-7), Int(2)) == Int(-4));
    CHECK_THROWS(Int::divexact(Int(5), Int(2)));
}

TEST_CASE("rationals") {
    Rat x(Int(1), Int(3)), y(Int(2), Int(5));
    CHECK((x + y) == Rat(Int(11), Int(15)));
    CHECK((x / y) == Rat(Int(5), Int(6)));
    CHECK((x - x).is_zero());
}
