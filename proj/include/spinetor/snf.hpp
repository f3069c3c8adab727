#pragma once

#include "spinetor/exact.hpp"
#include "spinetor/matrix.hpp"

namespace spinetor {

struct SmithForm {
    Mat<Int> d;      // diagonal with divisibility chain, entries >= 0
    Mat<Int> left;   // unimodular U
    Mat<Int> right;  // unimodular V, with d = U * m * V
    std::size_t rank = 0;
};

// Smith normal form of an integer matrix with both transforms.
SmithForm smith_normal_form(const Mat<Int>& m);

} // namespace spinetor
