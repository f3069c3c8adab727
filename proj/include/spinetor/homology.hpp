#pragma once

#include "spinetor/cellcomplex.hpp"
#include "spinetor/euler_chain.hpp"
#include "spinetor/snf.hpp"

#include <map>
#include <vector>

namespace spinetor {

// Class of a 1-cycle in H1: free coordinates plus torsion coordinates
// (each modulo the matching invariant factor).
struct H1Class {
    std::vector<Int> free;
    std::vector<Int> tor;

    H1Class() = default;
    static H1Class zero(std::size_t k, std::size_t ntor);
    H1Class plus(const H1Class& o, const std::vector<Int>& tor_orders) const;
    H1Class minus(const H1Class& o, const std::vector<Int>& tor_orders) const;
    bool is_zero() const;
    bool operator==(const H1Class& o) const { return free == o.free && tor == o.tor; }
    std::string str() const;
};

// First homology of the hatted manifold with deck labels on the 1-skeleton:
// a spanning tree rooted at x0 (tree 1-cells label zero) and, for every
// 1-cell, the class of its fundamental cycle.
class H1Data {
public:
    std::size_t free_rank = 0;
    std::vector<Int> tor_orders;  // invariant factors > 1

    // Deterministic spanning tree: BFS from x0, ties by cell id.
    std::vector<int> tree_edges;

    // Per 1-cell label; tree edges carry zero.
    std::map<int, H1Class> edge_label;

    H1Class label_of_walk(const Walk& w) const;
    H1Class class_of_cycle(const std::map<int, long>& edge_coeffs) const;
    H1Class zero() const { return H1Class::zero(free_rank, tor_orders.size()); }
    H1Class add(const H1Class& a, const H1Class& b) const { return a.plus(b, tor_orders); }
    H1Class sub(const H1Class& a, const H1Class& b) const { return a.minus(b, tor_orders); }

    // Internals kept for class computations.
    std::vector<int> one_cells;               // ids in matrix order
    std::map<int, std::size_t> one_cell_pos;  // id -> column
    Mat<Int> kernel_basis;                    // E x m
    SmithForm h1_snf;                         // of the relations in kernel coordinates
    std::size_t kernel_dim = 0;

    // Optional permutation applied to the free coordinates and sign flips,
    // letting callers pin a preferred generator. Defaults to identity.
    std::vector<int> free_signs;

    H1Class raw_class_of_kernel_vector(const std::vector<Int>& z) const;
};

// Computes H1 of the full complex (all cells), with deck labels. Requires a
// connected 1-skeleton containing x0.
H1Data compute_h1(const AttachedComplex& cx);

// Difference class of two Euler chains of the same kind over the same complex.
H1Class chain_difference(const AttachedComplex& cx, const H1Data& h1, const EulerChain& z1,
                         const EulerChain& z2);

// Solve V x = y exactly for unimodular V; throws when inconsistent.
std::vector<Int> solve_unimodular(const Mat<Int>& v, const std::vector<Int>& y);

} // namespace spinetor
