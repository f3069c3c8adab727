#include <doctest.h>

#include "spinetor/snf.hpp"

#include <random>

using namespace spinetor;

namespace {
Mat<Int> from_rows(std::initializer_list<std::initializer_list<int>> rows) {
    std::size_t r = rows.size(), c = rows.begin()->size();
    Mat<Int> m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        std::size_t j = 0;
        for (int x : row) m(i, j++) = Int(x);
        ++i;
    }
    return m;
}

Int det3x3ish(const Mat<Int>& m) {
    // Determinant by expansion for small square matrices (tests only).
    std::size_t n = m.rows();
    if (n == 1) return m(0, 0);
    Int acc(0);
    int sign = 1;
    for (std::size_t j = 0; j < n; ++j) {
        Mat<Int> sub(n - 1, n - 1);
        for (std::size_t r = 1; r < n; ++r) {
            std::size_t cc = 0;
            for (std::size_t c = 0; c < n; ++c) {
                if (c == j) continue;
                sub(r - 1, cc++) = m(r, c);
            }
        }
        acc += Int(sign) * m(0, j) * det3x3ish(sub);
        sign = -sign;
    }
    return acc;
}
} // namespace

TEST_CASE("diag(2,3) becomes diag(1,6)") {
    auto s = smith_normal_form(from_rows({{2, 0}, {0, 3}}));
    CHECK(s.d(0, 0) == Int(1));
    CHECK(s.d(1, 1) == Int(6));
    CHECK(s.rank == 2);
}

TEST_CASE("zero matrix") {
    auto s = smith_normal_form(Mat<Int>(3, 2));
    CHECK(s.rank == 0);
    CHECK(s.d.is_zero());
}

TEST_CASE("transforms reproduce the form and are unimodular") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> dist(-5, 5);
    for (int trial = 0; trial < 30; ++trial) {
        std::size_t r = 1 + rng() % 4, c = 1 + rng() % 4;
        Mat<Int> m(r, c);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) m(i, j) = Int(dist(rng));
        auto s = smith_normal_form(m);
        CHECK(s.left * m * s.right == s.d);
        // Divisibility chain and signs.
        for (std::size_t i = 0; i + 1 < std::min(r, c); ++i) {
            if (!s.d(i + 1, i + 1).is_zero()) {
                CHECK(!s.d(i, i).is_zero());
                CHECK(Int::gcd(s.d(i, i), s.d(i + 1, i + 1)) == s.d(i, i).abs());
            }
            CHECK(!(s.d(i, i).sign() < 0));
        }
        CHECK(det3x3ish(s.left).abs() == Int(1));
        CHECK(det3x3ish(s.right).abs() == Int(1));
    }
}
