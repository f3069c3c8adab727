#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinetor {

// Permutation of {0,1,2}, stored as images.
struct Perm3 {
    std::array<int, 3> img{0, 1, 2};

    static Perm3 from_word(const std::string& w);
    std::string word() const;
    Perm3 inverse() const;
    int operator[](int i) const { return img[static_cast<std::size_t>(i)]; }
    bool operator==(const Perm3& o) const { return img == o.img; }
    int sign() const;
};

// Tetrahedron edges indexed 0..5 as vertex pairs 01,02,03,12,13,23.
constexpr std::array<std::array<int, 2>, 6> kEdgePair = {{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

int edge_index(int a, int b);
// Vertices of face f (the face opposite vertex f), ascending.
std::array<int, 3> face_vertices(int f);

struct FaceGluing {
    bool glued = false;
    int tet = -1;
    int face = -1;
    Perm3 perm;  // position k of source face's ascending vertices -> position perm[k] of target's
};

struct Tetra {
    std::array<FaceGluing, 4> glue;
    // true: edge oriented from lower to higher vertex label.
    std::array<bool, 6> edge_up{true, true, true, true, true, true};
};

class TriError : public std::runtime_error {
public:
    enum class Kind { Syntax, Involution, Orientation, EdgeOrientation, Branching, Disconnected, Structure };
    TriError(Kind k, const std::string& msg, int line = -1) : std::runtime_error(msg), kind(k), line(line) {}
    Kind kind;
    int line;
};

struct BranchingReport {
    struct PerTet {
        int source = -1;
        int sink = -1;
        bool ok = false;
        std::string issue;
    };
    bool pass = false;
    std::vector<PerTet> tets;
};

class BranchedTriangulation {
public:
    std::vector<Tetra> tets;

    std::size_t size() const { return tets.size(); }

    // Oriented edge of tet t with index e: (tail, head) as vertex labels.
    std::array<int, 2> oriented_edge(std::size_t t, int e) const;

    // Extended permutation of {0,1,2,3} of the gluing at (t, f); requires glued.
    std::array<int, 4> gluing_map(std::size_t t, int f) const;

    // Structural validation: involutivity, orientability (odd gluing maps),
    // edge-orientation consistency, branching, connectedness; throws TriError.
    void validate() const;
    bool all_faces_glued() const;

    // Total branching order of the 4 vertices of tet t, source first.
    std::array<int, 4> vertex_order(std::size_t t) const;

    // --- derived class structure -------------------------------------------
    // Edge classes over (t, e) pairs, id = t*6+e.
    std::vector<int> edge_class_ids;          // size 6N, class representative index
    std::size_t n_edge_classes = 0;
    // Corner classes over (t, v), id = t*4+v (ideal vertices / cusps).
    std::vector<int> vertex_class_ids;        // size 4N
    std::size_t n_vertex_classes = 0;
    std::size_t n_face_classes = 0;

    void build_classes();                     // fills the above; needs all faces glued

    int edge_class(std::size_t t, int e) const { return edge_class_ids[t * 6 + static_cast<std::size_t>(e)]; }
    int vertex_class(std::size_t t, int v) const { return vertex_class_ids[t * 4 + static_cast<std::size_t>(v)]; }

    std::string serialize() const;
};

BranchedTriangulation parse_triangulation(const std::string& text);
BranchingReport validate_branching(const BranchedTriangulation& t);

// Spine dual view: counts plus the region boundary circuits used by the digger.
struct SpineComplex {
    std::size_t n_vertices = 0;  // = tetrahedra
    std::size_t n_edges = 0;     // = glued face pairs
    std::size_t n_regions = 0;   // = triangulation edge classes

    // For each region (edge class), the cyclic walk around the triangulation
    // edge: sequence of (tet, edge-index-in-tet, face crossed to reach next).
    struct EdgeRing {
        struct Step {
            int tet;
            int edge;       // tet-edge index 0..5
            int exit_face;  // face of tet crossed to get to the next step
        };
        std::vector<Step> steps;
    };
    std::vector<EdgeRing> region_rings;  // indexed by edge-class order of appearance
    std::vector<int> region_of_class;    // edge class rep -> region index
};

SpineComplex dual_spine(const BranchedTriangulation& t);

} // namespace spinetor
