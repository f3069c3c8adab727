#pragma once

#include "spinetor/cellcomplex.hpp"

#include <map>
#include <string>
#include <vector>

namespace spinetor {

enum class ChainKind { Convex, Concave, Blackened };

// A primitive leg: a path from the source cell's base corner to the target
// cell's base corner, carried with an integer coefficient.
struct ChainLeg {
    int source = -1;
    int target = -1;
    int coeff = 0;
    Walk walk;
};

struct EulerChain {
    ChainKind kind = ChainKind::Convex;
    std::vector<ChainLeg> legs;

    // Support components as spiders: canonical head plus a walk to each member.
    struct Spider {
        int head = -1;
        std::vector<int> members;            // cells covered, head included
        std::map<int, Walk> walk_from_head;  // member -> walk (head's is empty)
    };
    std::vector<Spider> spiders(const AttachedComplex& cx) const;

    // Net boundary coefficient per cell id.
    std::map<int, long> boundary_coefficients() const;
};

struct BookkeepingReport {
    bool pass = false;
    std::vector<std::string> issues;
    std::map<int, long> coefficients;
};

// Defining property of the chain kind: every in-scope cell receives exactly
// ind(cell) = (-1)^dim, everything else zero.
BookkeepingReport check_bookkeeping(const AttachedComplex& cx, const EulerChain& z);

// The canonical convex chain s'(P): orbit legs plus boundary fixups.
EulerChain build_s_prime(const AttachedComplex& cx);

// Concave version s''(P) = s'(P) + second halves of the concave 1-cells.
EulerChain build_s_second(const AttachedComplex& cx, const EulerChain& s_prime);

// Removes the concave half-legs again (Theta^c).
EulerChain convexify(const AttachedComplex& cx, const EulerChain& z);

// Blackening z + z_W; requires a single white annulus. orientation flips the
// winding of the white Reeb chain by one longitude.
EulerChain blacken(const AttachedComplex& cx, const EulerChain& z, bool orientation);

// Compose the leg reaching `cell` with a loop (a closed walk at that cell's
// base corner); changes the represented structure by the loop's class.
EulerChain with_loop(const EulerChain& z, int cell, const Walk& loop);

struct H1Class;  // homology.hpp

} // namespace spinetor
