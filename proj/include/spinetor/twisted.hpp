#pragma once

#include "spinetor/cellcomplex.hpp"
#include "spinetor/euler_chain.hpp"
#include "spinetor/homology.hpp"
#include "spinetor/laurent.hpp"
#include "spinetor/matrix.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace spinetor {

// Representation of H1 into the units of the Laurent fraction field: each
// free generator maps to a unit monomial (t_i by default), torsion generators
// to +-1 with the order condition checked.
struct Representation {
    std::size_t k = 0;
    std::vector<LaurentRational> free_images;
    std::vector<int> torsion_images;  // +1 / -1

    static Representation standard(const H1Data& h1);
    // Parses assignments like t1=t2^-1 or g1=-1 on top of the standard one.
    static Representation with_assignments(const H1Data& h1,
                                           const std::map<std::string, std::string>& assignments);

    LaurentRational apply(const H1Class& cls) const;
    bool trivial_on_free() const;
};

enum class RelMode { WBar, None };

struct TwistedComplex {
    std::size_t nvars = 0;
    RelMode rel = RelMode::WBar;
    std::array<std::vector<int>, 4> basis_cells;  // per dimension, cell ids in order
    std::array<Mat<LaurentRational>, 4> d;        // d[i]: C_i -> C_{i-1}; d[0] unused

    bool boundary_squared_zero() const;
};

// Deck labels of the preferred lifts determined by an Euler chain.
std::map<int, H1Class> preferred_lifts(const AttachedComplex& cx, const H1Data& h1, const EulerChain& z);

TwistedComplex twisted_complex(const AttachedComplex& cx, const H1Data& h1,
                               const std::map<int, H1Class>& lifts, const Representation& rep,
                               RelMode rel);

bool is_acyclic(const TwistedComplex& tc);

// Torsion of a based acyclic complex by alternating minors; deterministic
// greedy subset choice (override via the optional preference order).
TorsionValue torsion(const TwistedComplex& tc,
                     const std::vector<std::vector<std::size_t>>* subset_preference = nullptr);

// Rank over the fraction field.
std::size_t rank_laurent(const Mat<LaurentRational>& m);
LaurentRational det_laurent(Mat<LaurentRational> m);

struct TorsionRunReport {
    std::string input_digest;
    std::size_t k = 0;
    std::vector<std::string> rep_desc;
    bool acyclic = false;
    TorsionValue value;
    std::vector<std::string> checks;
    std::string text() const;
    std::string json() const;
};

// Full pipeline on a complex: s'(P) lifts, twisted complex, torsion.
struct TorsionPipelineResult {
    H1Data h1;
    EulerChain chain;
    TwistedComplex complex;
    TorsionValue value;
    bool acyclic = false;
};

TorsionPipelineResult run_torsion(const AttachedComplex& cx, const Representation* rep_override = nullptr,
                                  RelMode rel = RelMode::WBar, bool blackened = false,
                                  bool blacken_orientation = false);

} // namespace spinetor
