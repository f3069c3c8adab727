#include "spinetor/euler_chain.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <sstream>

namespace spinetor {

namespace {

Walk reversed(const Walk& w) {
    Walk r(w.rbegin(), w.rend());
    for (auto& s : r) s.dir = -s.dir;
    return r;
}

Walk concat(const Walk& a, const Walk& b) {
    Walk c(a);
    c.insert(c.end(), b.begin(), b.end());
    return c;
}

int ind_of(const Cell& c) { return c.dim % 2 == 0 ? 1 : -1; }

const Incidence* find_incidence(const Cell& c, int face) {
    for (const Incidence& inc : c.boundary)
        if (inc.face == face) return &inc;
    return nullptr;
}

// Positions visited along a 2-cell's circuit: pairs (0-cell id, prefix walk
// from the cell's base corner to that position).
std::vector<std::pair<int, Walk>> circuit_positions(const AttachedComplex& cx, const Cell& c) {
    std::vector<std::pair<int, Walk>> out;
    Walk prefix;
    out.push_back({c.base_corner, prefix});
    for (const Incidence& inc : c.boundary) {
        const Cell& f = cx.cells[static_cast<std::size_t>(inc.face)];
        if (f.dim != 1) continue;
        prefix.push_back({inc.face, inc.sign});
        int pos = inc.sign > 0 ? f.ends[1] : f.ends[0];
        out.push_back({pos, prefix});
    }
    return out;
}

// Walk from a 0-cell on the circuit of `around` to another 0-cell on it.
Walk circuit_walk(const AttachedComplex& cx, const Cell& around, int from0, int to0) {
    auto pos = circuit_positions(cx, around);
    const Walk* wf = nullptr;
    const Walk* wt = nullptr;
    for (const auto& [p, w] : pos) {
        if (p == from0 && !wf) wf = &w;
        if (p == to0 && !wt) wt = &w;
    }
    if (!wf || !wt) throw std::logic_error("circuit_walk: endpoint not on circuit");
    return concat(reversed(*wf), *wt);
}

} // namespace

std::map<int, long> EulerChain::boundary_coefficients() const {
    std::map<int, long> out;
    for (const ChainLeg& l : legs) {
        out[l.target] += l.coeff;
        out[l.source] -= l.coeff;
    }
    return out;
}

std::vector<EulerChain::Spider> EulerChain::spiders(const AttachedComplex& cx) const {
    std::map<int, std::vector<std::size_t>> at;
    std::set<int> cells_seen;
    for (std::size_t i = 0; i < legs.size(); ++i) {
        at[legs[i].source].push_back(i);
        at[legs[i].target].push_back(i);
        cells_seen.insert(legs[i].source);
        cells_seen.insert(legs[i].target);
    }
    std::vector<Spider> out;
    std::set<int> done;
    for (int start : cells_seen) {
        if (done.count(start)) continue;
        std::set<int> comp;
        std::queue<int> q;
        q.push(start);
        comp.insert(start);
        while (!q.empty()) {
            int c = q.front();
            q.pop();
            for (std::size_t li : at[c])
                for (int other : {legs[li].source, legs[li].target})
                    if (!comp.count(other)) {
                        comp.insert(other);
                        q.push(other);
                    }
        }
        for (int c : comp) done.insert(c);
        Spider sp;
        sp.head = comp.count(cx.x0) ? cx.x0 : *comp.begin();
        sp.walk_from_head[sp.head] = {};
        std::queue<int> q2;
        q2.push(sp.head);
        while (!q2.empty()) {
            int c = q2.front();
            q2.pop();
            for (std::size_t li : at[c]) {
                const ChainLeg& l = legs[li];
                int other = (l.source == c) ? l.target : l.source;
                if (sp.walk_from_head.count(other)) continue;
                Walk w = (l.source == c) ? l.walk : reversed(l.walk);
                sp.walk_from_head[other] = concat(sp.walk_from_head[c], w);
                q2.push(other);
            }
        }
        for (int c : comp) sp.members.push_back(c);
        std::sort(sp.members.begin(), sp.members.end());
        out.push_back(std::move(sp));
    }
    std::sort(out.begin(), out.end(), [](const Spider& a, const Spider& b) { return a.head < b.head; });
    return out;
}

BookkeepingReport check_bookkeeping(const AttachedComplex& cx, const EulerChain& z) {
    BookkeepingReport rep;
    rep.coefficients = z.boundary_coefficients();
    rep.pass = true;
    auto in_scope = [&](const Cell& c) {
        switch (z.kind) {
            case ChainKind::Convex:
                return c.label != PatternLabel::White && c.label != PatternLabel::Concave;
            case ChainKind::Concave:
                return c.label != PatternLabel::White;
            case ChainKind::Blackened:
                return true;
        }
        return false;
    };
    for (const Cell& c : cx.cells) {
        long want = in_scope(c) ? ind_of(c) : 0;
        long got = 0;
        auto it = rep.coefficients.find(c.id);
        if (it != rep.coefficients.end()) got = it->second;
        if (got != want) {
            rep.pass = false;
            std::ostringstream os;
            os << "cell " << c.id << " (dim " << c.dim << ", kind " << static_cast<int>(c.kind)
               << ") has coefficient " << got << ", expected " << want;
            rep.issues.push_back(os.str());
        }
    }
    for (const auto& sp : z.spiders(cx)) {
        long s = 0;
        for (int m : sp.members) s += ind_of(cx.cells[static_cast<std::size_t>(m)]);
        if (s != 0) {
            rep.pass = false;
            rep.issues.push_back("spider with head " + std::to_string(sp.head) + " has index sum " +
                                 std::to_string(s));
        }
    }
    return rep;
}

EulerChain build_s_prime(const AttachedComplex& cx) {
    if (!cx.tri) throw std::logic_error("complex lacks its triangulation");
    const BranchedTriangulation& tri = *cx.tri;
    EulerChain z;
    z.kind = ChainKind::Convex;

    // Orbit legs from the dual 1-cells: along the edge to its head corner.
    for (std::size_t E = 0; E < tri.n_edge_classes; ++E) {
        int rc = cx.dual_edge[E];
        const Cell& c = cx.cells[static_cast<std::size_t>(rc)];
        z.legs.push_back({rc, c.ends[1], +1, {WalkStep{rc, +1}}});
    }

    // Orbit legs from the hexagons: to the sink-corner cut (midpoint in full
    // mode) or to x0 when the sink corner lies on the collapsed sphere.
    for (std::size_t F = 0; F < cx.dual_face.size(); ++F) {
        int hex = cx.dual_face[F];
        const Cell& h = cx.cells[static_cast<std::size_t>(hex)];
        int target = -1;
        for (const Cell& c : cx.cells) {
            if (cx.mode == SubdivisionMode::Economical) {
                if (c.kind == CellKind::Cut && c.key[0] == static_cast<int>(F) && c.key[1] == 2) target = c.id;
            } else if (c.kind == CellKind::SubPoint && c.key[0] == static_cast<int>(F) && c.key[1] == 2) {
                target = c.id;
            }
        }
        Walk w;
        if (target == -1) {
            target = cx.x0;
            // Circuit prefix through r(ab), cut(b), r(bc): ends at the sink
            // corner, which is x0 here.
            int dual_seen = 0;
            for (const Incidence& inc : h.boundary) {
                w.push_back({inc.face, inc.sign});
                if (cx.cells[static_cast<std::size_t>(inc.face)].kind == CellKind::DualEdge) {
                    dual_seen++;
                    if (dual_seen == 2) break;
                }
            }
            if (dual_seen != 2) throw std::logic_error("hexagon circuit lacks its bc side");
        } else if (cx.mode == SubdivisionMode::Economical) {
            const Incidence* inc = find_incidence(h, target);
            if (!inc) throw std::logic_error("hexagon does not touch its sink cut");
            w = inc->walk;
        } else {
            int half_lo = -1;
            for (const Cell& c : cx.cells)
                if (c.kind == CellKind::CutHalf && c.key[0] == static_cast<int>(F) && c.key[1] == 2 &&
                    c.key[2] == 0)
                    half_lo = c.id;
            const Incidence* inc = find_incidence(h, half_lo);
            if (!inc) throw std::logic_error("hexagon does not touch its sink cut halves");
            w = concat(inc->walk, {WalkStep{half_lo, +1}});
        }
        z.legs.push_back({hex, target, -1, std::move(w)});
    }

    // Orbit legs from the dual tets: into the sink truncation cell.
    for (std::size_t t = 0; t < cx.dual_tet.size(); ++t) {
        int tc = cx.dual_tet[t];
        const Cell& tcell = cx.cells[static_cast<std::size_t>(tc)];
        int sink = tri.vertex_order(t)[3];
        if (tri.vertex_class(t, sink) == cx.sphere_cusp) {
            z.legs.push_back({tc, cx.x0, +1, {}});
            continue;
        }
        if (cx.mode == SubdivisionMode::Economical) {
            int target = -1;
            for (const Cell& c : cx.cells)
                if (c.kind == CellKind::BTri && c.key[0] == static_cast<int>(t) && c.key[1] == sink) target = c.id;
            if (target < 0) throw std::logic_error("missing sink triangle");
            const Incidence* inc = find_incidence(tcell, target);
            if (!inc) throw std::logic_error("tet does not touch its sink triangle");
            z.legs.push_back({tc, target, +1, inc->walk});
        } else {
            int target = -1;
            for (const Cell& c : cx.cells)
                if (c.kind == CellKind::Center && c.key[0] == static_cast<int>(t) && c.key[1] == sink) target = c.id;
            if (target < 0) throw std::logic_error("missing sink centre");
            // Walk: into a sink kite's corner, then half to the midpoint, then
            // the short seg down to the centre.
            int kite = -1;
            for (const Cell& c : cx.cells)
                if (c.kind == CellKind::Kite && c.key[0] == static_cast<int>(t) && c.key[1] == sink) {
                    kite = c.id;
                    break;
                }
            const Incidence* inc = find_incidence(tcell, kite);
            if (!inc) throw std::logic_error("tet does not touch its sink kites");
            const Cell& kc = cx.cells[static_cast<std::size_t>(kite)];
            Walk w = inc->walk;
            // First two circuit steps of the kite: half into midpoint, then
            // reversed short seg into the centre.
            int steps = 0;
            for (const Incidence& ki : kc.boundary) {
                w.push_back({ki.face, ki.sign});
                if (++steps == 2) break;
            }
            z.legs.push_back({tc, target, +1, std::move(w)});
        }
    }

    // Boundary fixups.
    if (cx.mode == SubdivisionMode::Economical) {
        // Every middle-cut black half needs -1; every middle black piece +1.
        struct Piece {
            int id = -1;
            std::vector<int> halves;  // adjacent black CutHalf cell ids
            int corner = -1;          // black corner on its boundary
        };
        std::vector<Piece> pieces;
        std::map<int, std::vector<int>> piece_of_half;  // half id -> piece ids
        for (const Cell& c : cx.cells) {
            if (c.kind != CellKind::BPiece || c.label != PatternLabel::Black) continue;
            Piece p;
            p.id = c.id;
            for (const Incidence& inc : c.boundary) {
                const Cell& f = cx.cells[static_cast<std::size_t>(inc.face)];
                if (f.dim != 1) continue;
                if (f.kind == CellKind::CutHalf && f.label == PatternLabel::Black) {
                    if (std::find(p.halves.begin(), p.halves.end(), f.id) == p.halves.end())
                        p.halves.push_back(f.id);
                }
                if (f.label == PatternLabel::Black)
                    for (int endv : f.ends)
                        if (cx.cells[static_cast<std::size_t>(endv)].kind == CellKind::Corner &&
                            cx.cells[static_cast<std::size_t>(endv)].label == PatternLabel::Black)
                            p.corner = endv;
            }
            if (p.corner < 0) throw std::runtime_error("bookkeeping failure: black piece without black corner");
            for (int hid : p.halves) piece_of_half[hid].push_back(p.id);
            pieces.push_back(std::move(p));
        }
        // Perfect matching on the 2-regular piece/half graph (disjoint even
        // cycles): repeatedly take forced choices, else the smallest free pair.
        std::set<int> free_pieces, free_halves;
        for (const auto& p : pieces) free_pieces.insert(p.id);
        for (const auto& [hid, ps] : piece_of_half) free_halves.insert(hid);
        if (free_pieces.size() != free_halves.size())
            throw std::runtime_error("bookkeeping failure: piece/half count mismatch");
        std::map<int, int> match;  // piece -> half
        auto piece_by_id = [&](int id) -> const Piece& {
            for (const auto& p : pieces)
                if (p.id == id) return p;
            throw std::logic_error("piece lookup");
        };
        while (!free_pieces.empty()) {
            // Forced: a free half with one free adjacent piece.
            bool forced = false;
            for (int hid : free_halves) {
                std::vector<int> cand;
                for (int pid : piece_of_half[hid])
                    if (free_pieces.count(pid)) cand.push_back(pid);
                if (cand.size() == 1) {
                    match[cand[0]] = hid;
                    free_pieces.erase(cand[0]);
                    free_halves.erase(hid);
                    forced = true;
                    break;
                }
                if (cand.empty())
                    throw std::runtime_error("bookkeeping failure: unmatched black half");
            }
            if (forced) continue;
            int pid = *free_pieces.begin();
            const Piece& p = piece_by_id(pid);
            int pick = -1;
            for (int hid : p.halves)
                if (free_halves.count(hid) && (pick < 0 || hid < pick)) pick = hid;
            if (pick < 0) throw std::runtime_error("bookkeeping failure: piece with no free half");
            match[pid] = pick;
            free_pieces.erase(pid);
            free_halves.erase(pick);
        }
        for (const auto& [pid, hid] : match) {
            const Piece& p = piece_by_id(pid);
            const Cell& piece = cx.cells[static_cast<std::size_t>(pid)];
            const Cell& half = cx.cells[static_cast<std::size_t>(hid)];
            z.legs.push_back({p.corner, pid, +1, circuit_walk(cx, piece, p.corner, piece.base_corner)});
            z.legs.push_back({p.corner, hid, -1, circuit_walk(cx, piece, p.corner, half.base_corner)});
        }
    } else {
        // Full mode: stars at black corners, bi-arrows at black cut midpoints.
        for (const Cell& c : cx.cells) {
            if (c.kind != CellKind::Corner || c.label != PatternLabel::Black) continue;
            for (const Cell& k : cx.cells) {
                if (k.kind == CellKind::Kite && k.label == PatternLabel::Black && k.base_corner == c.id)
                    z.legs.push_back({c.id, k.id, +1, {}});
                if (k.kind == CellKind::CutHalf && k.label == PatternLabel::Black &&
                    (k.ends[0] == c.id || k.ends[1] == c.id)) {
                    // Walk from this corner to the half's base corner.
                    Walk w = (k.base_corner == c.id) ? Walk{} : Walk{WalkStep{k.id, -1}};
                    z.legs.push_back({c.id, k.id, -1, std::move(w)});
                }
            }
        }
        for (const Cell& c : cx.cells) {
            if (c.kind != CellKind::SubPoint || c.label != PatternLabel::Black) continue;
            for (const Cell& s : cx.cells)
                if (s.kind == CellKind::Seg && s.label == PatternLabel::Black && s.ends[1] == c.id)
                    z.legs.push_back({c.id, s.id, -1, {WalkStep{s.id, -1}}});
        }
    }

    BookkeepingReport rep = check_bookkeeping(cx, z);
    if (!rep.pass) {
        std::string msg = "s'(P) bookkeeping failure";
        if (!rep.issues.empty()) msg += ": " + rep.issues.front();
        throw std::runtime_error(msg);
    }
    return z;
}

EulerChain build_s_second(const AttachedComplex& cx, const EulerChain& s_prime) {
    EulerChain z = s_prime;
    z.kind = ChainKind::Concave;
    for (const auto& circ : cx.pattern.circles)
        for (std::size_t i = 0; i < circ.cells_1.size(); ++i) {
            int cid = circ.cells_1[i];
            int dir = circ.dirs[i];
            const Cell& c = cx.cells[static_cast<std::size_t>(cid)];
            int head = dir > 0 ? c.ends[1] : c.ends[0];
            Walk w = dir > 0 ? Walk{WalkStep{cid, +1}} : Walk{};
            z.legs.push_back({cid, head, +1, std::move(w)});
        }
    BookkeepingReport rep = check_bookkeeping(cx, z);
    if (!rep.pass) throw std::runtime_error("s''(P) bookkeeping failure");
    return z;
}

EulerChain convexify(const AttachedComplex& cx, const EulerChain& z) {
    if (z.kind != ChainKind::Concave) throw std::invalid_argument("convexify expects a concave chain");
    EulerChain out;
    out.kind = ChainKind::Convex;
    for (const ChainLeg& l : z.legs) {
        const Cell& s = cx.cells[static_cast<std::size_t>(l.source)];
        const Cell& t = cx.cells[static_cast<std::size_t>(l.target)];
        if (s.dim == 1 && t.dim == 0 && s.label == PatternLabel::Concave && t.label == PatternLabel::Concave)
            continue;
        out.legs.push_back(l);
    }
    BookkeepingReport rep = check_bookkeeping(cx, out);
    if (!rep.pass) throw std::runtime_error("convexify bookkeeping failure");
    return out;
}

EulerChain with_loop(const EulerChain& z, int cell, const Walk& loop) {
    EulerChain out = z;
    for (ChainLeg& l : out.legs)
        if (l.target == cell) {
            l.walk.insert(l.walk.end(), loop.begin(), loop.end());
            return out;
        }
    throw std::invalid_argument("with_loop: no leg reaches the given cell");
}

EulerChain blacken(const AttachedComplex& cx, const EulerChain& z, bool orientation) {
    if (z.kind != ChainKind::Concave) throw std::invalid_argument("blacken expects the concave chain");
    std::vector<int> wcells;
    for (const Cell& c : cx.cells)
        if (c.label == PatternLabel::White) wcells.push_back(c.id);
    if (wcells.empty()) throw std::runtime_error("blacken: no white part");
    long chiw = 0;
    for (int id : wcells) chiw += ind_of(cx.cells[static_cast<std::size_t>(id)]);
    if (chiw != 0) throw std::runtime_error("blacken: white part is not an annulus");
    if (cx.pattern.circles.size() != 2)
        throw std::runtime_error("blacken: boundary pattern is not a knot-exterior pattern");

    // Spanning tree of the closed white 1-skeleton.
    std::map<int, std::vector<std::pair<int, WalkStep>>> adj;
    for (const Cell& c : cx.cells) {
        if (c.dim != 1) continue;
        if (c.label != PatternLabel::White && c.label != PatternLabel::Concave) continue;
        adj[c.ends[0]].push_back({c.ends[1], WalkStep{c.id, +1}});
        adj[c.ends[1]].push_back({c.ends[0], WalkStep{c.id, -1}});
    }
    int root = -1;
    for (const Cell& c : cx.cells)
        if (c.dim == 0 && c.label == PatternLabel::White) {
            root = c.id;
            break;
        }
    if (root < 0) throw std::runtime_error("blacken: white part has no vertex");
    std::map<int, Walk> tree_walk;
    tree_walk[root] = {};
    std::queue<int> q;
    q.push(root);
    while (!q.empty()) {
        int n = q.front();
        q.pop();
        for (const auto& [m, step] : adj[n])
            if (!tree_walk.count(m)) {
                Walk w = tree_walk[n];
                w.push_back(step);
                tree_walk[m] = std::move(w);
                q.push(m);
            }
    }

    EulerChain out = z;
    out.kind = ChainKind::Blackened;
    bool shift_pending = orientation;
    for (int id : wcells) {
        if (id == root) continue;
        const Cell& c = cx.cells[static_cast<std::size_t>(id)];
        if (!tree_walk.count(c.base_corner))
            throw std::runtime_error("blacken: white skeleton is disconnected");
        Walk w = tree_walk[c.base_corner];
        if (shift_pending && c.dim == 2) {
            // Wind the chain once along a concave circle (the longitude).
            const auto& circ = cx.pattern.circles[0];
            Walk loop;
            for (std::size_t i = 0; i < circ.cells_1.size(); ++i)
                loop.push_back({circ.cells_1[i], circ.dirs[i]});
            int start = circ.dirs[0] > 0 ? cx.cells[static_cast<std::size_t>(circ.cells_1[0])].ends[0]
                                         : cx.cells[static_cast<std::size_t>(circ.cells_1[0])].ends[1];
            if (!tree_walk.count(start))
                throw std::runtime_error("blacken: concave circle detached from the white tree");
            Walk conj = tree_walk[start];
            Walk full = concat(concat(conj, loop), reversed(conj));
            w = concat(full, w);
            shift_pending = false;
        }
        out.legs.push_back({root, id, ind_of(c), std::move(w)});
    }
    BookkeepingReport rep = check_bookkeeping(cx, out);
    if (!rep.pass) {
        std::string msg = "blacken bookkeeping failure";
        if (!rep.issues.empty()) msg += ": " + rep.issues.front();
        throw std::runtime_error(msg);
    }
    return out;
}

} // namespace spinetor
