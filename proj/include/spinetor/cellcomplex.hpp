#pragma once

#include "spinetor/exact.hpp"
#include "spinetor/matrix.hpp"
#include "spinetor/triangulation.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace spinetor {

enum class SubdivisionMode { Economical, Full };

enum class PatternLabel { Interior, White, Black, Concave, X0 };

// Provenance of a cell in the hatted cellularization.
enum class CellKind {
    X0,          // the collapsed trivial sphere
    Corner,      // boundary vertex at an end of a triangulation edge
    SubPoint,    // subdivision vertex on a boundary cut (lies on C)
    Center,      // triangle center vertex (full subdivision only; lies on C or W/B)
    DualEdge,    // r-hat: truncated triangulation edge, one per edge class
    Cut,         // whole long edge on the boundary (unsubdivided)
    CutHalf,     // half of a subdivided long edge
    Seg,         // subdivision segment (economical) / short kite edge (full)
    DualFace,    // e-hat: hexagon, one per face class
    BTri,        // whole boundary triangle, type (3,0) or (0,3) (economical)
    BPiece,      // black or white piece of a subdivided triangle (economical)
    Kite,        // kite (full subdivision)
    DualTet      // v-hat, one per tetrahedron
};

struct WalkStep {
    int one_cell;  // 1-cell id
    int dir;       // +1 tail->head, -1 head->tail
    bool operator==(const WalkStep& o) const { return one_cell == o.one_cell && dir == o.dir; }
};
using Walk = std::vector<WalkStep>;

struct Incidence {
    int face;   // cell id of the codim-1 face
    int sign;   // +1 / -1
    Walk walk;  // from this cell's base corner to the face cell's base corner
};

struct Cell {
    int id = -1;
    int dim = 0;
    CellKind kind = CellKind::X0;
    PatternLabel label = PatternLabel::Interior;
    // Provenance keys; meaning depends on kind (documented in cellcomplex.cpp).
    std::array<int, 3> key{-1, -1, -1};
    int base_corner = -1;          // a 0-cell id (itself for 0-cells)
    std::array<int, 2> ends{-1, -1};  // 1-cells: tail, head 0-cell ids
    std::vector<Incidence> boundary;
};

struct BoundaryPattern {
    // Concave circles as cyclic lists of alternating 0-/1-cell ids, oriented
    // as components of the boundary of the closed black part.
    struct Circle {
        std::vector<int> cells_0;  // subdivision points in cyclic order
        std::vector<int> cells_1;  // C one-cells; cells_1[i] runs cells_0[i] -> cells_0[i+1]
        std::vector<int> dirs;     // +-1: direction of cells_1[i] relative to its orientation
    };
    std::vector<Circle> circles;
};

struct ComplexReport {
    std::array<std::size_t, 4> cell_counts{};           // all cells by dim
    std::array<std::size_t, 4> nonwhite_counts{};       // cells outside W union C
    long euler = 0;                                      // chi of the hatted manifold
    bool boundary_squared_zero = false;
    bool pattern_valid = false;
    long euler_residue = 0;  // chi(M-hat) - (chi(Wbar) - chi(C))
    std::string summary() const;
};

class AttachedComplex {
public:
    SubdivisionMode mode = SubdivisionMode::Economical;
    std::vector<Cell> cells;
    int x0 = -1;  // id of the special vertex

    // Dual-cell lookups.
    std::vector<int> dual_tet;       // tet index -> 3-cell id
    std::vector<int> dual_face;      // face class -> 2-cell id
    std::vector<int> dual_edge;      // edge class -> 1-cell id
    std::map<std::array<int, 2>, int> corner_cell;  // (edge class, head?1:0) -> 0-cell id or x0

    int sphere_cusp = -1;            // vertex class collapsed to x0
    std::vector<int> cusp_of_class;  // vertex class -> boundary component index, -1 for sphere

    BoundaryPattern pattern;

    const BranchedTriangulation* tri = nullptr;  // source triangulation (borrowed)

    std::vector<const Cell*> cells_of_dim(int d) const;
    std::array<std::size_t, 4> counts() const;
    std::array<std::size_t, 4> counts_excluding(bool exclude_white, bool exclude_concave) const;

    // Integer boundary matrix from dim d to d-1 over all cells (columns: d-cells).
    Mat<Int> boundary_matrix(int d) const;
    // Same, restricted to cells outside W (and outside C when rel_wbar).
    Mat<Int> boundary_matrix_rel(int d, bool rel_wbar, std::vector<int>* col_cells = nullptr,
                                 std::vector<int>* row_cells = nullptr) const;

    bool is_boundary_cell(int id) const {
        PatternLabel l = cells[static_cast<std::size_t>(id)].label;
        return l == PatternLabel::White || l == PatternLabel::Black || l == PatternLabel::Concave;
    }

    ComplexReport check() const;
    std::string report_json() const;
};

// Builds the cellularization of the capped manifold; throws TriError when the
// triangulation has no (or more than one) trivial sphere boundary component.
AttachedComplex build_hatted_complex(const BranchedTriangulation& t,
                                     SubdivisionMode mode = SubdivisionMode::Economical);

BoundaryPattern boundary_pattern(const AttachedComplex& c);

ComplexReport check_complex(const AttachedComplex& c);

} // namespace spinetor
