#pragma once

#include "spinetor/triangulation.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace spinetor {

// A C1 knot diagram on the spine dual to a base triangulation. Events are
// cyclic; every crossing event sits between two region arcs.
struct KnotEvent {
    enum class Type { Arc, EdgeCross, SelfCross };
    Type type = Type::Arc;
    int region = -1;   // Arc: region id (= triangulation edge class)
    int slot = -1;     // Arc: exit step index on the region's boundary ring
    int edge = -1;     // EdgeCross: spine edge id (= face class)
    int xing = -1;     // SelfCross: crossing id
    bool over = false; // SelfCross
    int sign = +1;     // SelfCross
};

struct KnotDiagram {
    std::string spine_name;
    std::vector<KnotEvent> events;

    std::string serialize() const;
};

KnotDiagram parse_diagram(const std::string& text);

// Local-model conventions. The tunnel blocks are tetrahedra whose vertices
// are the four complement chambers sorted by height; which chamber each wall
// germ sits opposite is a finite convention, pinned once by the abalone
// fixture battery (orientability forces the two blocks of an edge crossing
// to be mirror-asymmetric, and the four corners of a crossing to alternate).
struct DigConventions {
    bool left_toward_current = true;  // left foot meets the spine edge on the exit tet's side
    // Strand-side bookkeeping between consecutive crossing events; bit k set
    // means the two feet swap sides on the connection leaving event k.
    std::vector<int> feet_swap;
    // Edge-crossing blocks: role -> face index; roles are
    //   0 = outward edge piece, 1 = partner gluing, 2 = foot before, 3 = foot after.
    // One entry per flap side; the block picks the variant whose outward-face
    // parity is compatible with the crossed face (they differ per flap side).
    std::vector<std::array<int, 4>> edge_left{{1, 0, 2, 3}, {2, 3, 1, 0}};
    std::vector<std::array<int, 4>> edge_right{{2, 3, 1, 0}, {1, 0, 2, 3}};
    // Self-crossing corner blocks, checkerboarded (V1,V4 type 0; V2,V3 type 1):
    //   roles 0 = over strand toward the centre, 1 = over outward,
    //         2 = under outward, 3 = under toward the centre.
    std::array<int, 4> x_type0{0, 1, 2, 3};
    std::array<int, 4> x_type1{1, 0, 3, 2};
};

struct DigResult {
    BranchedTriangulation output;
    // New tetrahedra per event, in strand order.
    std::vector<std::vector<int>> event_tets;
    std::map<int, std::string> tet_origin;  // new tet -> description
    std::vector<int> strand_tets;           // event tets in strand order (flattened)
};

class DigError : public std::runtime_error {
public:
    explicit DigError(const std::string& m) : std::runtime_error(m) {}
};

DigResult dig_tunnel(const BranchedTriangulation& spine, const KnotDiagram& d,
                     const DigConventions& conv = {});

// Inserts a framing-preserving double curl inside the arc at `site` (index
// into the event list, which must be an Arc). sign +1 raises the meridian
// class of the structure, -1 lowers it.
KnotDiagram add_double_curl(const KnotDiagram& d, int sign, int site);

} // namespace spinetor
