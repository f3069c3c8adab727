#include "spinetor/snf.hpp"

namespace spinetor {

namespace {

// Row op: r_i -= q * r_j, mirrored in U.
void row_sub(Mat<Int>& a, Mat<Int>& u, std::size_t i, std::size_t j, const Int& q) {
    if (q.is_zero()) return;
    for (std::size_t k = 0; k < a.cols(); ++k) a(i, k) -= q * a(j, k);
    for (std::size_t k = 0; k < u.cols(); ++k) u(i, k) -= q * u(j, k);
}

void col_sub(Mat<Int>& a, Mat<Int>& v, std::size_t i, std::size_t j, const Int& q) {
    if (q.is_zero()) return;
    for (std::size_t k = 0; k < a.rows(); ++k) a(k, i) -= q * a(k, j);
    for (std::size_t k = 0; k < v.rows(); ++k) v(k, i) -= q * v(k, j);
}

void negate_row(Mat<Int>& a, Mat<Int>& u, std::size_t i) {
    for (std::size_t k = 0; k < a.cols(); ++k) a(i, k) = -a(i, k);
    for (std::size_t k = 0; k < u.cols(); ++k) u(i, k) = -u(i, k);
}

} // namespace

SmithForm smith_normal_form(const Mat<Int>& m) {
    const std::size_t R = m.rows(), C = m.cols();
    SmithForm out;
    out.d = m;
    out.left = Mat<Int>::identity(R);
    out.right = Mat<Int>::identity(C);
    Mat<Int>& a = out.d;
    Mat<Int>& u = out.left;
    Mat<Int>& v = out.right;

    std::size_t t = 0;
    const std::size_t nmin = R < C ? R : C;
    while (t < nmin) {
        // Find the smallest nonzero pivot in the remaining block.
        std::size_t pi = t, pj = t;
        bool found = false;
        for (std::size_t i = t; i < R; ++i)
            for (std::size_t j = t; j < C; ++j) {
                if (a(i, j).is_zero()) continue;
                if (!found || a(i, j).abs() < a(pi, pj).abs()) {
                    pi = i;
                    pj = j;
                    found = true;
                }
            }
        if (!found) break;
        if (pi != t) { a.swap_rows(t, pi); u.swap_rows(t, pi); }
        if (pj != t) { a.swap_cols(t, pj); v.swap_cols(t, pj); }

        // Clear row/column t; restart when a remainder creates a smaller pivot.
        bool dirty = true;
        while (dirty) {
            dirty = false;
            for (std::size_t i = t + 1; i < R; ++i) {
                if (a(i, t).is_zero()) continue;
                Int q = Int::fdiv_q(a(i, t), a(t, t));
                row_sub(a, u, i, t, q);
                if (!a(i, t).is_zero()) { a.swap_rows(t, i); u.swap_rows(t, i); dirty = true; }
            }
            for (std::size_t j = t + 1; j < C; ++j) {
                if (a(t, j).is_zero()) continue;
                Int q = Int::fdiv_q(a(t, j), a(t, t));
                col_sub(a, v, j, t, q);
                if (!a(t, j).is_zero()) { a.swap_cols(t, j); v.swap_cols(t, j); dirty = true; }
            }
        }

        // Enforce divisibility of the remaining block by the pivot.
        bool redo = false;
        for (std::size_t i = t + 1; i < R && !redo; ++i)
            for (std::size_t j = t + 1; j < C && !redo; ++j) {
                if (a(i, j).is_zero()) continue;
                Int r = a(i, j) - Int::fdiv_q(a(i, j), a(t, t)) * a(t, t);
                if (!r.is_zero()) {
                    // Add row i to row t, then redo the elimination at t.
                    row_sub(a, u, t, i, Int(-1));
                    redo = true;
                }
            }
        if (redo) continue;

        if (a(t, t).sign() < 0) negate_row(a, u, t);
        ++t;
    }
    out.rank = t;
    return out;
}

} // namespace spinetor
