#include "spinetor/cellcomplex.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <tuple>

namespace spinetor {

// Provenance keys:
//   Corner   {edge class, head?1:0, -1}
//   SubPoint {face class, corner rank, -1}
//   Center   {tet, vertex, -1}           (full mode)
//   DualEdge {edge class, -1, -1}
//   Cut      {face class, corner rank, -1}
//   CutHalf  {face class, corner rank, 0 lo / 1 hi}
//   Seg      {tet, vertex, -1}           (economical; full uses {tet, vertex, side})
//   DualFace {face class, -1, -1}
//   BTri     {tet, vertex, -1}
//   BPiece   {tet, vertex, 0 black / 1 white}
//   Kite     {tet, vertex, corner edge index}
//   DualTet  {tet, -1, -1}

namespace {

struct PolyStep {
    int cell = -1;  // 1-cell id, -1 for a side collapsed into x0
    int dir = +1;
    int vfrom = -1;
    int vto = -1;
};
using Polygon = std::vector<PolyStep>;

struct FaceInfo {
    int rep_tet = -1, rep_face = -1;
    std::array<int, 3> corner_vert{};  // face vertices in branching order a<b<c (rep labels)
    std::array<int, 3> edge_class{};   // classes of ab, bc, ac
    std::array<int, 3> cusp{};         // vertex classes of a, b, c
};

} // namespace

struct ComplexBuilder {
    const BranchedTriangulation& tri;
    SubdivisionMode mode;
    AttachedComplex& cx;

    std::vector<FaceInfo> faces;
    std::vector<int> face_class_of;  // (t*4+f) -> face class
    std::map<std::array<int, 2>, int> sub_cell;     // (face class, rank) -> SubPoint id
    std::map<std::array<int, 2>, int> center_cell;  // (t,v) -> Center id

    struct CutSet {
        int whole = -1, half_lo = -1, half_hi = -1, sub = -1;
        int corner_lo = -1, corner_hi = -1;
        bool on_sphere = false;
    };
    std::map<std::array<int, 2>, CutSet> cut_sets;             // (face class, rank)
    std::map<std::array<int, 2>, std::vector<int>> tri_cells;  // (t,v) -> 2-cell ids

    ComplexBuilder(const BranchedTriangulation& t, SubdivisionMode m, AttachedComplex& out)
        : tri(t), mode(m), cx(out) {}

    int new_cell(int dim, CellKind kind, PatternLabel label, std::array<int, 3> key) {
        Cell c;
        c.id = static_cast<int>(cx.cells.size());
        c.dim = dim;
        c.kind = kind;
        c.label = label;
        c.key = key;
        if (dim == 0) c.base_corner = c.id;
        cx.cells.push_back(std::move(c));
        return cx.cells.back().id;
    }

    int tet_rank(int t, int v) const {
        auto ord = tri.vertex_order(static_cast<std::size_t>(t));
        for (int i = 0; i < 4; ++i)
            if (ord[static_cast<std::size_t>(i)] == v) return i;
        throw std::logic_error("tet_rank");
    }

    // Black corner <=> the edge points into the ideal vertex.
    bool corner_black(int t, int v, int e) const {
        return tri.oriented_edge(static_cast<std::size_t>(t), e)[1] == v;
    }

    void compute_faces() {
        face_class_of.assign(tri.size() * 4, -1);
        std::map<long, int> class_of_min;
        for (std::size_t t = 0; t < tri.size(); ++t)
            for (int f = 0; f < 4; ++f) {
                const FaceGluing& g = tri.tets[t].glue[static_cast<std::size_t>(f)];
                if (!g.glued)
                    throw TriError(TriError::Kind::Structure, "complex build requires all faces glued");
                long me = static_cast<long>(t) * 4 + f;
                long other = static_cast<long>(g.tet) * 4 + g.face;
                long key = std::min(me, other);
                auto [it, inserted] = class_of_min.emplace(key, static_cast<int>(faces.size()));
                if (inserted) {
                    FaceInfo fi;
                    fi.rep_tet = static_cast<int>(key / 4);
                    fi.rep_face = static_cast<int>(key % 4);
                    faces.push_back(fi);
                }
                face_class_of[static_cast<std::size_t>(me)] = it->second;
            }
        for (auto& fi : faces) {
            int t = fi.rep_tet, f = fi.rep_face;
            auto fv = face_vertices(f);
            std::array<int, 3> vs = fv;
            std::sort(vs.begin(), vs.end(), [&](int x, int y) { return tet_rank(t, x) < tet_rank(t, y); });
            fi.corner_vert = vs;
            fi.edge_class = {tri.edge_class(static_cast<std::size_t>(t), edge_index(vs[0], vs[1])),
                             tri.edge_class(static_cast<std::size_t>(t), edge_index(vs[1], vs[2])),
                             tri.edge_class(static_cast<std::size_t>(t), edge_index(vs[0], vs[2]))};
            fi.cusp = {tri.vertex_class(static_cast<std::size_t>(t), vs[0]),
                       tri.vertex_class(static_cast<std::size_t>(t), vs[1]),
                       tri.vertex_class(static_cast<std::size_t>(t), vs[2])};
        }
    }

    // Vertex pairs (rep labels) of the lo/hi flank edges of the rank-r corner.
    std::array<std::array<int, 2>, 2> cut_flank_pairs(int F, int r) const {
        const FaceInfo& fi = faces[static_cast<std::size_t>(F)];
        int a = fi.corner_vert[0], b = fi.corner_vert[1], c = fi.corner_vert[2];
        if (r == 0) return {{{a, b}, {a, c}}};
        if (r == 1) return {{{a, b}, {b, c}}};
        return {{{a, c}, {b, c}}};
    }

    std::array<int, 2> cut_flank_edge_classes(int F, int r) const {
        const FaceInfo& fi = faces[static_cast<std::size_t>(F)];
        if (r == 0) return {fi.edge_class[0], fi.edge_class[2]};
        if (r == 1) return {fi.edge_class[0], fi.edge_class[1]};
        return {fi.edge_class[2], fi.edge_class[1]};
    }

    // Is the rank-r corner of F the head end of its lo (flank 0) / hi (flank 1) edge?
    bool corner_is_head(int F, int r, int flank) const {
        const FaceInfo& fi = faces[static_cast<std::size_t>(F)];
        int t = fi.rep_tet;
        int v = fi.corner_vert[static_cast<std::size_t>(r)];
        auto pr = cut_flank_pairs(F, r)[static_cast<std::size_t>(flank)];
        int e = edge_index(pr[0], pr[1]);
        return tri.oriented_edge(static_cast<std::size_t>(t), e)[1] == v;
    }

    int corner_id(int edge_class, bool head) const {
        return cx.corner_cell.at({edge_class, head ? 1 : 0});
    }

    int corner_cell_of(int t, int v, int e) const {
        int E = tri.edge_class(static_cast<std::size_t>(t), e);
        return corner_id(E, corner_black(t, v, e));
    }

    std::array<int, 3> triangle_corner_edges(int t, int v) const {
        std::vector<int> es;
        for (int e = 0; e < 6; ++e) {
            auto [x, y] = kEdgePair[static_cast<std::size_t>(e)];
            if (x == v || y == v) es.push_back(e);
        }
        auto other = [&](int e) {
            auto [x, y] = kEdgePair[static_cast<std::size_t>(e)];
            return x == v ? y : x;
        };
        std::sort(es.begin(), es.end(),
                  [&](int e1, int e2) { return tet_rank(t, other(e1)) < tet_rank(t, other(e2)); });
        return {es[0], es[1], es[2]};
    }

    std::tuple<int, int, int> side_face_rank(int t, int v, int e1, int e2) const {
        auto other = [&](int e) {
            auto [x, y] = kEdgePair[static_cast<std::size_t>(e)];
            return x == v ? y : x;
        };
        int w1 = other(e1), w2 = other(e2);
        int f = 6 - v - w1 - w2;
        int F = face_class_of[static_cast<std::size_t>(t) * 4 + static_cast<std::size_t>(f)];
        int r = face_corner_rank(F, t, f, v);
        return {F, r, f};
    }

    int face_corner_rank(int F, int t, int f, int v) const {
        const FaceInfo& fi = faces[static_cast<std::size_t>(F)];
        int vr = v;
        if (!(fi.rep_tet == t && fi.rep_face == f)) {
            auto sigma = tri.gluing_map(static_cast<std::size_t>(t), f);
            vr = sigma[static_cast<std::size_t>(v)];
        }
        for (int r = 0; r < 3; ++r)
            if (fi.corner_vert[static_cast<std::size_t>(r)] == vr) return r;
        throw std::logic_error("face_corner_rank: vertex not on face");
    }

    // Whether the corner at edge e1 of triangle (t,v) is the lo flank of the
    // side lying on face f (class F, rank r). Resolved on vertex pairs mapped
    // into the representative side, so self-adjacencies are safe.
    bool corner_is_lo_flank(int t, int f, int e1, int F, int r) const {
        const FaceInfo& fi = faces[static_cast<std::size_t>(F)];
        auto [x, y] = kEdgePair[static_cast<std::size_t>(e1)];
        std::array<int, 2> pr{x, y};
        if (!(fi.rep_tet == t && fi.rep_face == f)) {
            auto sigma = tri.gluing_map(static_cast<std::size_t>(t), f);
            pr = {sigma[static_cast<std::size_t>(x)], sigma[static_cast<std::size_t>(y)]};
        }
        if (pr[0] > pr[1]) std::swap(pr[0], pr[1]);
        auto pairs = cut_flank_pairs(F, r);
        auto norm = [](std::array<int, 2> p) {
            if (p[0] > p[1]) std::swap(p[0], p[1]);
            return p;
        };
        if (pr == norm(pairs[0])) return true;
        if (pr == norm(pairs[1])) return false;
        throw std::logic_error("corner_is_lo_flank: edge is not a flank of that corner");
    }

    void append_cut_path(Polygon& poly, int F, int r, bool from_lo) const {
        const CutSet& cs = cut_sets.at({F, r});
        if (cs.on_sphere) {
            poly.push_back({-1, +1, cx.x0, cx.x0});
            return;
        }
        if (cs.whole != -1) {
            if (from_lo) poly.push_back({cs.whole, +1, cs.corner_lo, cs.corner_hi});
            else poly.push_back({cs.whole, -1, cs.corner_hi, cs.corner_lo});
        } else if (from_lo) {
            poly.push_back({cs.half_lo, +1, cs.corner_lo, cs.sub});
            poly.push_back({cs.half_hi, +1, cs.sub, cs.corner_hi});
        } else {
            poly.push_back({cs.half_hi, -1, cs.corner_hi, cs.sub});
            poly.push_back({cs.half_lo, -1, cs.sub, cs.corner_lo});
        }
    }

    void attach_polygon(int cell_id, const Polygon& poly) {
        Cell& c = cx.cells[static_cast<std::size_t>(cell_id)];
        c.base_corner = poly.empty() ? cx.x0 : poly.front().vfrom;
        Walk prefix;
        for (const PolyStep& st : poly) {
            if (st.cell != -1) {
                Incidence inc;
                inc.face = st.cell;
                inc.sign = st.dir;
                inc.walk = prefix;
                if (st.dir == -1) inc.walk.push_back({st.cell, -1});
                c.boundary.push_back(std::move(inc));
                prefix.push_back({st.cell, st.dir});
            }
        }
    }

    Polygon hexagon_polygon(int F) const {
        const FaceInfo& fi = faces[static_cast<std::size_t>(F)];
        Polygon poly;
        int rab = cx.dual_edge[static_cast<std::size_t>(fi.edge_class[0])];
        int rbc = cx.dual_edge[static_cast<std::size_t>(fi.edge_class[1])];
        int rac = cx.dual_edge[static_cast<std::size_t>(fi.edge_class[2])];
        auto ends = [&](int rc) { return cx.cells[static_cast<std::size_t>(rc)].ends; };
        poly.push_back({rab, +1, ends(rab)[0], ends(rab)[1]});
        append_cut_path(poly, F, 1, true);   // corner b: arrive on lo (ab) flank
        poly.push_back({rbc, +1, ends(rbc)[0], ends(rbc)[1]});
        append_cut_path(poly, F, 2, false);  // corner c: arrive on hi (bc) flank
        poly.push_back({rac, -1, ends(rac)[1], ends(rac)[0]});
        append_cut_path(poly, F, 0, false);  // corner a: arrive on hi (ac) flank
        return poly;
    }

    std::array<std::array<int, 2>, 2> middle_triangle_cut_faces(int t, int v) const {
        int rank = tet_rank(t, v);
        int minority_edge = -1;
        for (int e = 0; e < 6; ++e) {
            auto [x, y] = kEdgePair[static_cast<std::size_t>(e)];
            if (x != v && y != v) continue;
            bool black = corner_black(t, v, e);
            if ((rank == 1 && black) || (rank == 2 && !black)) minority_edge = e;
        }
        if (minority_edge < 0) throw std::logic_error("middle triangle without minority corner");
        auto [x, y] = kEdgePair[static_cast<std::size_t>(minority_edge)];
        int w = (x == v) ? y : x;
        std::vector<std::array<int, 2>> out;
        for (int f = 0; f < 4; ++f) {
            if (f == v || f == w) continue;  // faces containing v and w
            int F = face_class_of[static_cast<std::size_t>(t) * 4 + static_cast<std::size_t>(f)];
            int r = face_corner_rank(F, t, f, v);
            out.push_back({F, r});
        }
        std::sort(out.begin(), out.end());
        return {out[0], out[1]};
    }

    int economical_seg(int t, int v) const {
        for (const Cell& c : cx.cells)
            if (c.kind == CellKind::Seg && c.key[0] == t && c.key[1] == v && c.key[2] == -1) return c.id;
        return -1;
    }

    int find_short_seg(int t, int v, int F, int r) const {
        for (const Cell& c : cx.cells)
            if (c.kind == CellKind::Seg && c.key[0] == t && c.key[1] == v && c.key[2] >= 0) {
                auto [Fc, rc, f] = kite_side_info(t, v, c.key[2]);
                if (Fc == F && rc == r) return c.id;
            }
        throw std::logic_error("short seg not found");
    }

    std::tuple<int, int, int> kite_side_info(int t, int v, int side) const {
        std::vector<int> fs;
        for (int f = 0; f < 4; ++f)
            if (f != v) fs.push_back(f);
        int f = fs[static_cast<std::size_t>(side)];
        int F = face_class_of[static_cast<std::size_t>(t) * 4 + static_cast<std::size_t>(f)];
        int r = face_corner_rank(F, t, f, v);
        return {F, r, f};
    }

    void build_triangle_cells(int t, int v) {
        int rank = tet_rank(t, v);
        auto ce = triangle_corner_edges(t, v);

        // Corner sequence of the induced circuit: forward for odd rank.
        std::array<int, 3> seq = (rank % 2 == 1) ? std::array<int, 3>{0, 1, 2} : std::array<int, 3>{0, 2, 1};

        Polygon poly;
        for (int k = 0; k < 3; ++k) {
            int ea = ce[static_cast<std::size_t>(seq[static_cast<std::size_t>(k)])];
            int eb = ce[static_cast<std::size_t>(seq[static_cast<std::size_t>((k + 1) % 3)])];
            auto [F, r, f] = side_face_rank(t, v, ea, eb);
            bool from_lo = corner_is_lo_flank(t, f, ea, F, r);
            append_cut_path(poly, F, r, from_lo);
        }

        std::vector<int>& tc = tri_cells[{t, v}];
        if (mode == SubdivisionMode::Economical) {
            if (rank == 0 || rank == 3) {
                PatternLabel lab = rank == 3 ? PatternLabel::Black : PatternLabel::White;
                int id = new_cell(2, CellKind::BTri, lab, {t, v, -1});
                attach_polygon(id, poly);
                tc.push_back(id);
                return;
            }
            int seg = economical_seg(t, v);
            if (seg < 0) throw std::logic_error("missing seg for middle triangle");
            const Cell& sc = cx.cells[static_cast<std::size_t>(seg)];
            std::vector<std::size_t> hits;
            for (std::size_t i = 0; i < poly.size(); ++i) {
                const Cell& pc = cx.cells[static_cast<std::size_t>(poly[i].cell)];
                if (pc.kind == CellKind::CutHalf && (poly[i].vto == sc.ends[0] || poly[i].vto == sc.ends[1]))
                    hits.push_back(i);
            }
            if (hits.size() != 2) throw std::logic_error("triangle split: expected two subdivision points");
            auto arc = [&](std::size_t from, std::size_t to) {
                Polygon p;
                for (std::size_t i = (from + 1) % poly.size();; i = (i + 1) % poly.size()) {
                    p.push_back(poly[i]);
                    if (i == to) break;
                }
                return p;
            };
            Polygon arc1 = arc(hits[0], hits[1]);
            Polygon arc2 = arc(hits[1], hits[0]);
            auto close_with_seg = [&](Polygon p, int start_v) {
                int end_v = p.back().vto;
                int dir = 0;
                if (sc.ends[0] == end_v && sc.ends[1] == start_v) dir = +1;
                else if (sc.ends[1] == end_v && sc.ends[0] == start_v) dir = -1;
                else throw std::logic_error("seg does not close the arc");
                p.push_back({seg, dir, end_v, start_v});
                return p;
            };
            arc1 = close_with_seg(std::move(arc1), poly[hits[0]].vto);
            arc2 = close_with_seg(std::move(arc2), poly[hits[1]].vto);
            auto piece_black = [&](const Polygon& p) {
                for (const PolyStep& st : p) {
                    const Cell& c2 = cx.cells[static_cast<std::size_t>(st.cell)];
                    if (c2.kind == CellKind::Seg) continue;
                    if (c2.label == PatternLabel::Black) return true;
                    if (c2.label == PatternLabel::White) return false;
                }
                throw std::logic_error("piece with no colored side");
            };
            bool b1 = piece_black(arc1);
            int idb = new_cell(2, CellKind::BPiece, PatternLabel::Black, {t, v, 0});
            attach_polygon(idb, b1 ? arc1 : arc2);
            int idw = new_cell(2, CellKind::BPiece, PatternLabel::White, {t, v, 1});
            attach_polygon(idw, b1 ? arc2 : arc1);
            tc.push_back(idb);
            tc.push_back(idw);
            return;
        }

        // Full subdivision: one kite per corner, circulating like the parent.
        int ctr = center_cell.at({t, v});
        for (int k = 0; k < 3; ++k) {
            int e_this = ce[static_cast<std::size_t>(seq[static_cast<std::size_t>(k)])];
            int e_next = ce[static_cast<std::size_t>(seq[static_cast<std::size_t>((k + 1) % 3)])];
            int e_prev = ce[static_cast<std::size_t>(seq[static_cast<std::size_t>((k + 2) % 3)])];
            auto [Fn, rn, fn] = side_face_rank(t, v, e_this, e_next);
            auto [Fp, rp, fp] = side_face_rank(t, v, e_this, e_prev);
            const CutSet& csn = cut_sets.at({Fn, rn});
            const CutSet& csp = cut_sets.at({Fp, rp});
            int corner = corner_cell_of(t, v, e_this);
            bool lo_n = corner_is_lo_flank(t, fn, e_this, Fn, rn);
            bool lo_p = corner_is_lo_flank(t, fp, e_this, Fp, rp);
            int half_n = lo_n ? csn.half_lo : csn.half_hi;
            int half_p = lo_p ? csp.half_lo : csp.half_hi;
            int segn = find_short_seg(t, v, Fn, rn);
            int segp = find_short_seg(t, v, Fp, rp);
            Polygon kp;
            kp.push_back({half_n, lo_n ? +1 : -1, corner, csn.sub});
            kp.push_back({segn, -1, csn.sub, ctr});
            kp.push_back({segp, +1, ctr, csp.sub});
            kp.push_back({half_p, lo_p ? -1 : +1, csp.sub, corner});
            bool blk = corner_black(t, v, e_this);
            int id = new_cell(2, CellKind::Kite, blk ? PatternLabel::Black : PatternLabel::White, {t, v, e_this});
            attach_polygon(id, kp);
            tc.push_back(id);
        }
    }

    // Shortest walks in the 1-skeleton of the closure of tet t between corner
    // slots (v, e); computed on the polyhedron, then mapped to cell ids.
    Walk tet_walk(int t, std::array<int, 2> from, std::array<int, 2> to) const {
        if (from == to) return {};
        struct GraphEdge {
            std::array<int, 2> to;
            Walk walk;
        };
        std::map<std::array<int, 2>, std::vector<GraphEdge>> adj;
        for (int e = 0; e < 6; ++e) {
            auto oe = tri.oriented_edge(static_cast<std::size_t>(t), e);
            int rc = cx.dual_edge[static_cast<std::size_t>(tri.edge_class(static_cast<std::size_t>(t), e))];
            adj[{oe[0], e}].push_back({{oe[1], e}, {WalkStep{rc, +1}}});
            adj[{oe[1], e}].push_back({{oe[0], e}, {WalkStep{rc, -1}}});
        }
        for (int v = 0; v < 4; ++v) {
            auto ce = triangle_corner_edges(t, v);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    if (i == j) continue;
                    auto [F, r, f] = side_face_rank(t, v, ce[static_cast<std::size_t>(i)], ce[static_cast<std::size_t>(j)]);
                    const CutSet& cs = cut_sets.at({F, r});
                    bool i_lo = corner_is_lo_flank(t, f, ce[static_cast<std::size_t>(i)], F, r);
                    Walk wlk;
                    if (!cs.on_sphere) {
                        if (cs.whole != -1) {
                            wlk.push_back({cs.whole, i_lo ? +1 : -1});
                        } else if (i_lo) {
                            wlk.push_back({cs.half_lo, +1});
                            wlk.push_back({cs.half_hi, +1});
                        } else {
                            wlk.push_back({cs.half_hi, -1});
                            wlk.push_back({cs.half_lo, -1});
                        }
                    }
                    adj[{v, ce[static_cast<std::size_t>(i)]}].push_back({{v, ce[static_cast<std::size_t>(j)]}, wlk});
                }
        }
        std::map<std::array<int, 2>, std::pair<std::array<int, 2>, Walk>> prev;
        std::queue<std::array<int, 2>> q;
        q.push(from);
        prev[from] = {from, {}};
        while (!q.empty()) {
            auto n = q.front();
            q.pop();
            if (n == to) break;
            for (const auto& ge : adj[n])
                if (!prev.count(ge.to)) {
                    prev[ge.to] = {n, ge.walk};
                    q.push(ge.to);
                }
        }
        if (!prev.count(to)) throw std::logic_error("tet_walk: disconnected skeleton");
        std::vector<Walk> parts;
        for (auto n = to; n != from; n = prev[n].first) parts.push_back(prev[n].second);
        Walk out;
        for (auto it = parts.rbegin(); it != parts.rend(); ++it)
            for (const auto& s : *it) out.push_back(s);
        return out;
    }

    void build_tet_boundary(int t, int tet_cell) {
        auto ord = tri.vertex_order(static_cast<std::size_t>(t));
        int e01 = edge_index(ord[0], ord[1]);
        std::array<int, 2> base_slot{ord[0], e01};
        cx.cells[static_cast<std::size_t>(tet_cell)].base_corner = corner_cell_of(t, ord[0], e01);

        for (int i = 0; i < 4; ++i) {
            int f = ord[static_cast<std::size_t>(i)];
            int F = face_class_of[static_cast<std::size_t>(t) * 4 + static_cast<std::size_t>(f)];
            const FaceInfo& fi = faces[static_cast<std::size_t>(F)];
            std::array<int, 3> asc_t = face_vertices(f);
            std::sort(asc_t.begin(), asc_t.end(),
                      [&](int x, int y) { return tet_rank(t, x) < tet_rank(t, y); });
            // Gluings preserve edge orientations, hence the face branching
            // order; the circuit orientation therefore matches on both sides.
            if (!(fi.rep_tet == t && fi.rep_face == f)) {
                auto sigma = tri.gluing_map(static_cast<std::size_t>(t), f);
                for (int k = 0; k < 3; ++k)
                    if (sigma[static_cast<std::size_t>(asc_t[static_cast<std::size_t>(k)])] !=
                        fi.corner_vert[static_cast<std::size_t>(k)])
                        throw std::logic_error("face branching order not preserved by gluing");
            }
            Incidence inc;
            inc.face = cx.dual_face[static_cast<std::size_t>(F)];
            inc.sign = (i % 2 == 0) ? +1 : -1;
            inc.walk = tet_walk(t, base_slot, {asc_t[0], edge_index(asc_t[0], asc_t[1])});
            cx.cells[static_cast<std::size_t>(tet_cell)].boundary.push_back(std::move(inc));
        }

        for (int v = 0; v < 4; ++v) {
            if (tri.vertex_class(static_cast<std::size_t>(t), v) == cx.sphere_cusp) continue;
            auto it = tri_cells.find({t, v});
            if (it == tri_cells.end()) continue;
            for (int id : it->second) {
                const Cell& tcell = cx.cells[static_cast<std::size_t>(id)];
                Incidence inc;
                inc.face = id;
                inc.sign = +1;
                inc.walk = tet_walk(t, base_slot, slot_of_zero_cell(t, v, tcell.base_corner));
                cx.cells[static_cast<std::size_t>(tet_cell)].boundary.push_back(std::move(inc));
            }
        }
    }

    std::array<int, 2> slot_of_zero_cell(int t, int v, int cell) const {
        auto ce = triangle_corner_edges(t, v);
        for (int e : ce)
            if (corner_cell_of(t, v, e) == cell) return {v, e};
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) {
                auto [F, r, f] = side_face_rank(t, v, ce[static_cast<std::size_t>(i)], ce[static_cast<std::size_t>(j)]);
                const CutSet& cs = cut_sets.at({F, r});
                if (cs.sub == cell) {
                    bool i_lo = corner_is_lo_flank(t, f, ce[static_cast<std::size_t>(i)], F, r);
                    return {v, i_lo ? ce[static_cast<std::size_t>(i)] : ce[static_cast<std::size_t>(j)]};
                }
            }
        if (mode == SubdivisionMode::Full && center_cell.count({t, v}) && center_cell.at({t, v}) == cell)
            return {v, ce[0]};
        throw std::logic_error("slot_of_zero_cell: cell not on this triangle");
    }

    // The tangency line on the sphere cusp must be a single circle. Nodes are
    // the middle subdivision points of face classes at the cusp; segments are
    // the middle triangles there.
    void check_sphere_pattern() const {
        struct SegRec {
            std::array<int, 2> p0, p1;
        };
        std::vector<SegRec> segs;
        std::map<std::array<int, 2>, std::vector<std::size_t>> at;
        for (std::size_t t = 0; t < tri.size(); ++t)
            for (int v = 0; v < 4; ++v) {
                if (tri.vertex_class(t, v) != cx.sphere_cusp) continue;
                int rank = tet_rank(static_cast<int>(t), v);
                if (rank == 0 || rank == 3) continue;
                auto fcs = middle_triangle_cut_faces(static_cast<int>(t), v);
                at[fcs[0]].push_back(segs.size());
                at[fcs[1]].push_back(segs.size());
                segs.push_back({fcs[0], fcs[1]});
            }
        if (segs.empty())
            throw TriError(TriError::Kind::Structure, "sphere boundary component carries no tangency circle");
        for (const auto& [pt, ss] : at)
            if (ss.size() != 2)
                throw TriError(TriError::Kind::Structure, "sphere tangency line is not a 1-manifold");
        // Circle count via seg traversal.
        std::vector<bool> used(segs.size(), false);
        int circles = 0;
        for (std::size_t s0 = 0; s0 < segs.size(); ++s0) {
            if (used[s0]) continue;
            circles++;
            std::size_t s = s0;
            std::array<int, 2> node = segs[s0].p0;
            while (!used[s]) {
                used[s] = true;
                std::array<int, 2> nxt = (segs[s].p0 == node) ? segs[s].p1 : segs[s].p0;
                const auto& ss = at.at(nxt);
                std::size_t s2 = (ss[0] == s) ? ss[1] : ss[0];
                node = nxt;
                s = s2;
            }
        }
        if (circles != 1)
            throw TriError(TriError::Kind::Structure,
                           "sphere boundary component is not trivially combed (tangency circles: " +
                               std::to_string(circles) + ")");
    }

    void build() {
        compute_faces();

        // Cusps and their link Euler characteristics.
        std::vector<long> link_tris(tri.n_vertex_classes, 0), link_edges(tri.n_vertex_classes, 0),
            link_verts(tri.n_vertex_classes, 0);
        for (std::size_t t = 0; t < tri.size(); ++t)
            for (int v = 0; v < 4; ++v) link_tris[static_cast<std::size_t>(tri.vertex_class(t, v))]++;
        for (const auto& fi : faces)
            for (int r = 0; r < 3; ++r) link_edges[static_cast<std::size_t>(fi.cusp[static_cast<std::size_t>(r)])]++;
        std::vector<std::array<int, 2>> edge_end_cusp(tri.n_edge_classes, {-1, -1});
        for (std::size_t t = 0; t < tri.size(); ++t)
            for (int e = 0; e < 6; ++e) {
                int E = tri.edge_class(t, e);
                auto oe = tri.oriented_edge(t, e);
                edge_end_cusp[static_cast<std::size_t>(E)][0] = tri.vertex_class(t, oe[0]);
                edge_end_cusp[static_cast<std::size_t>(E)][1] = tri.vertex_class(t, oe[1]);
            }
        for (std::size_t E = 0; E < tri.n_edge_classes; ++E) {
            link_verts[static_cast<std::size_t>(edge_end_cusp[E][0])]++;
            link_verts[static_cast<std::size_t>(edge_end_cusp[E][1])]++;
        }
        int sphere = -1;
        for (std::size_t c = 0; c < tri.n_vertex_classes; ++c) {
            long chi = link_verts[c] - link_edges[c] + link_tris[c];
            if (chi == 2) {
                if (sphere != -1)
                    throw TriError(TriError::Kind::Structure, "more than one trivial sphere boundary component");
                sphere = static_cast<int>(c);
            }
        }
        if (sphere == -1)
            throw TriError(TriError::Kind::Structure, "no trivial sphere boundary component to cap");
        cx.sphere_cusp = sphere;
        cx.cusp_of_class.assign(tri.n_vertex_classes, -1);
        int next_comp = 0;
        for (std::size_t c = 0; c < tri.n_vertex_classes; ++c)
            cx.cusp_of_class[c] = (static_cast<int>(c) == sphere) ? -1 : next_comp++;

        check_sphere_pattern();

        // 0-cells.
        cx.x0 = new_cell(0, CellKind::X0, PatternLabel::X0, {-1, -1, -1});
        for (std::size_t E = 0; E < tri.n_edge_classes; ++E)
            for (int end = 0; end < 2; ++end) {
                if (edge_end_cusp[E][static_cast<std::size_t>(end)] == sphere) {
                    cx.corner_cell[{static_cast<int>(E), end}] = cx.x0;
                } else {
                    cx.corner_cell[{static_cast<int>(E), end}] =
                        new_cell(0, CellKind::Corner, end == 1 ? PatternLabel::Black : PatternLabel::White,
                                 {static_cast<int>(E), end, -1});
                }
            }
        for (std::size_t F = 0; F < faces.size(); ++F)
            for (int r = 0; r < 3; ++r) {
                bool split = (mode == SubdivisionMode::Full) || (r == 1);
                if (!split) continue;
                if (faces[F].cusp[static_cast<std::size_t>(r)] == sphere) continue;
                bool lo_b = corner_is_head(static_cast<int>(F), r, 0);
                bool hi_b = corner_is_head(static_cast<int>(F), r, 1);
                PatternLabel lab = (lo_b && hi_b)    ? PatternLabel::Black
                                   : (!lo_b && !hi_b) ? PatternLabel::White
                                                      : PatternLabel::Concave;
                sub_cell[{static_cast<int>(F), r}] =
                    new_cell(0, CellKind::SubPoint, lab, {static_cast<int>(F), r, -1});
            }
        if (mode == SubdivisionMode::Full) {
            for (std::size_t t = 0; t < tri.size(); ++t)
                for (int v = 0; v < 4; ++v) {
                    if (tri.vertex_class(t, v) == sphere) continue;
                    int blacks = 0;
                    for (int e = 0; e < 6; ++e) {
                        auto [x, y] = kEdgePair[static_cast<std::size_t>(e)];
                        if (x != v && y != v) continue;
                        if (corner_black(static_cast<int>(t), v, e)) blacks++;
                    }
                    PatternLabel lab = blacks == 3   ? PatternLabel::Black
                                       : blacks == 0 ? PatternLabel::White
                                                     : PatternLabel::Concave;
                    center_cell[{static_cast<int>(t), v}] =
                        new_cell(0, CellKind::Center, lab, {static_cast<int>(t), v, -1});
                }
        }

        // 1-cells.
        cx.dual_edge.assign(tri.n_edge_classes, -1);
        for (std::size_t E = 0; E < tri.n_edge_classes; ++E) {
            int id = new_cell(1, CellKind::DualEdge, PatternLabel::Interior, {static_cast<int>(E), -1, -1});
            Cell& c = cx.cells[static_cast<std::size_t>(id)];
            c.ends = {corner_id(static_cast<int>(E), false), corner_id(static_cast<int>(E), true)};
            c.base_corner = c.ends[0];
            cx.dual_edge[E] = id;
        }
        for (std::size_t F = 0; F < faces.size(); ++F)
            for (int r = 0; r < 3; ++r) {
                CutSet cs;
                cs.on_sphere = (faces[F].cusp[static_cast<std::size_t>(r)] == sphere);
                auto flank = cut_flank_edge_classes(static_cast<int>(F), r);
                bool lo_head = corner_is_head(static_cast<int>(F), r, 0);
                bool hi_head = corner_is_head(static_cast<int>(F), r, 1);
                if (!cs.on_sphere) {
                    cs.corner_lo = corner_id(flank[0], lo_head);
                    cs.corner_hi = corner_id(flank[1], hi_head);
                    bool split = (mode == SubdivisionMode::Full) || (r == 1);
                    if (!split) {
                        cs.whole = new_cell(1, CellKind::Cut,
                                            lo_head ? PatternLabel::Black : PatternLabel::White,
                                            {static_cast<int>(F), r, -1});
                        Cell& c = cx.cells[static_cast<std::size_t>(cs.whole)];
                        c.ends = {cs.corner_lo, cs.corner_hi};
                        c.base_corner = cs.corner_lo;
                    } else {
                        cs.sub = sub_cell.at({static_cast<int>(F), r});
                        cs.half_lo = new_cell(1, CellKind::CutHalf,
                                              lo_head ? PatternLabel::Black : PatternLabel::White,
                                              {static_cast<int>(F), r, 0});
                        cx.cells[static_cast<std::size_t>(cs.half_lo)].ends = {cs.corner_lo, cs.sub};
                        cx.cells[static_cast<std::size_t>(cs.half_lo)].base_corner = cs.corner_lo;
                        cs.half_hi = new_cell(1, CellKind::CutHalf,
                                              hi_head ? PatternLabel::Black : PatternLabel::White,
                                              {static_cast<int>(F), r, 1});
                        cx.cells[static_cast<std::size_t>(cs.half_hi)].ends = {cs.sub, cs.corner_hi};
                        cx.cells[static_cast<std::size_t>(cs.half_hi)].base_corner = cs.sub;
                    }
                } else {
                    cs.corner_lo = cx.x0;
                    cs.corner_hi = cx.x0;
                }
                cut_sets[{static_cast<int>(F), r}] = cs;
            }
        if (mode == SubdivisionMode::Economical) {
            for (std::size_t t = 0; t < tri.size(); ++t)
                for (int v = 0; v < 4; ++v) {
                    if (tri.vertex_class(t, v) == cx.sphere_cusp) continue;
                    int rank = tet_rank(static_cast<int>(t), v);
                    if (rank == 0 || rank == 3) continue;
                    auto fcs = middle_triangle_cut_faces(static_cast<int>(t), v);
                    int s1 = cut_sets.at(fcs[0]).sub;
                    int s2 = cut_sets.at(fcs[1]).sub;
                    int id = new_cell(1, CellKind::Seg, PatternLabel::Concave, {static_cast<int>(t), v, -1});
                    Cell& c = cx.cells[static_cast<std::size_t>(id)];
                    c.ends = {s1, s2};
                    c.base_corner = s1;
                }
        } else {
            for (std::size_t t = 0; t < tri.size(); ++t)
                for (int v = 0; v < 4; ++v) {
                    if (tri.vertex_class(t, v) == cx.sphere_cusp) continue;
                    for (int side = 0; side < 3; ++side) {
                        auto [F, r, f] = kite_side_info(static_cast<int>(t), v, side);
                        bool lo_b = corner_is_head(F, r, 0);
                        bool hi_b = corner_is_head(F, r, 1);
                        PatternLabel lab = (lo_b && hi_b)    ? PatternLabel::Black
                                           : (!lo_b && !hi_b) ? PatternLabel::White
                                                              : PatternLabel::Concave;
                        int id = new_cell(1, CellKind::Seg, lab, {static_cast<int>(t), v, side});
                        Cell& c = cx.cells[static_cast<std::size_t>(id)];
                        c.ends = {center_cell.at({static_cast<int>(t), v}), cut_sets.at({F, r}).sub};
                        c.base_corner = c.ends[0];
                    }
                }
        }
        for (Cell& c : cx.cells) {
            if (c.dim != 1) continue;
            c.boundary.push_back({c.ends[1], +1, {WalkStep{c.id, +1}}});
            c.boundary.push_back({c.ends[0], -1, {}});
        }

        // 2-cells.
        cx.dual_face.assign(faces.size(), -1);
        for (std::size_t F = 0; F < faces.size(); ++F) {
            int id = new_cell(2, CellKind::DualFace, PatternLabel::Interior, {static_cast<int>(F), -1, -1});
            cx.dual_face[F] = id;
            attach_polygon(id, hexagon_polygon(static_cast<int>(F)));
        }
        for (std::size_t t = 0; t < tri.size(); ++t)
            for (int v = 0; v < 4; ++v) {
                if (tri.vertex_class(t, v) == cx.sphere_cusp) continue;
                build_triangle_cells(static_cast<int>(t), v);
            }

        // 3-cells.
        cx.dual_tet.assign(tri.size(), -1);
        for (std::size_t t = 0; t < tri.size(); ++t) {
            int id = new_cell(3, CellKind::DualTet, PatternLabel::Interior, {static_cast<int>(t), -1, -1});
            cx.dual_tet[t] = id;
            build_tet_boundary(static_cast<int>(t), id);
        }

        cx.pattern = boundary_pattern(cx);
    }
};

AttachedComplex build_hatted_complex(const BranchedTriangulation& t, SubdivisionMode mode) {
    AttachedComplex cx;
    cx.mode = mode;
    cx.tri = &t;
    ComplexBuilder b(t, mode, cx);
    b.build();
    return cx;
}

std::vector<const Cell*> AttachedComplex::cells_of_dim(int d) const {
    std::vector<const Cell*> out;
    for (const Cell& c : cells)
        if (c.dim == d) out.push_back(&c);
    return out;
}

std::array<std::size_t, 4> AttachedComplex::counts() const {
    std::array<std::size_t, 4> n{0, 0, 0, 0};
    for (const Cell& c : cells) n[static_cast<std::size_t>(c.dim)]++;
    return n;
}

std::array<std::size_t, 4> AttachedComplex::counts_excluding(bool exclude_white, bool exclude_concave) const {
    std::array<std::size_t, 4> n{0, 0, 0, 0};
    for (const Cell& c : cells) {
        if (exclude_white && c.label == PatternLabel::White) continue;
        if (exclude_concave && c.label == PatternLabel::Concave) continue;
        n[static_cast<std::size_t>(c.dim)]++;
    }
    return n;
}

Mat<Int> AttachedComplex::boundary_matrix(int d) const {
    std::vector<int> rows, cols;
    std::map<int, std::size_t> row_of;
    for (const Cell& c : cells) {
        if (c.dim == d - 1) {
            row_of[c.id] = rows.size();
            rows.push_back(c.id);
        }
        if (c.dim == d) cols.push_back(c.id);
    }
    Mat<Int> m(rows.size(), cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (const Incidence& inc : cells[static_cast<std::size_t>(cols[j])].boundary)
            m(row_of.at(inc.face), j) += Int(inc.sign);
    return m;
}

Mat<Int> AttachedComplex::boundary_matrix_rel(int d, bool rel_wbar, std::vector<int>* col_cells,
                                              std::vector<int>* row_cells) const {
    auto keep = [&](const Cell& c) {
        if (c.label == PatternLabel::White) return false;
        if (rel_wbar && c.label == PatternLabel::Concave) return false;
        return true;
    };
    std::vector<int> rows, cols;
    std::map<int, std::size_t> row_of;
    for (const Cell& c : cells) {
        if (!keep(c)) continue;
        if (c.dim == d - 1) {
            row_of[c.id] = rows.size();
            rows.push_back(c.id);
        }
        if (c.dim == d) cols.push_back(c.id);
    }
    Mat<Int> m(rows.size(), cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (const Incidence& inc : cells[static_cast<std::size_t>(cols[j])].boundary) {
            auto it = row_of.find(inc.face);
            if (it == row_of.end()) continue;
            m(it->second, j) += Int(inc.sign);
        }
    if (col_cells) *col_cells = cols;
    if (row_cells) *row_cells = rows;
    return m;
}

BoundaryPattern boundary_pattern(const AttachedComplex& cx) {
    BoundaryPattern pat;
    std::map<int, int> c_dir;  // C 1-cell -> direction induced by its black side
    for (const Cell& c : cx.cells) {
        if (c.dim != 2 || c.label != PatternLabel::Black) continue;
        for (const Incidence& inc : c.boundary) {
            const Cell& f = cx.cells[static_cast<std::size_t>(inc.face)];
            if (f.label == PatternLabel::Concave) {
                auto it = c_dir.find(f.id);
                if (it != c_dir.end() && it->second != inc.sign)
                    throw std::runtime_error("pattern labeling inconsistency: conflicting concave orientations");
                c_dir[f.id] = inc.sign;
            }
        }
    }
    std::set<int> used;
    for (const auto& [cid0, dir0] : c_dir) {
        if (used.count(cid0)) continue;
        BoundaryPattern::Circle circ;
        int cur = cid0;
        while (!used.count(cur)) {
            used.insert(cur);
            const Cell& cc = cx.cells[static_cast<std::size_t>(cur)];
            int d = c_dir.at(cur);
            circ.cells_1.push_back(cur);
            circ.dirs.push_back(d);
            int head = d > 0 ? cc.ends[1] : cc.ends[0];
            circ.cells_0.push_back(head);
            int nxt = -1;
            for (const auto& [cid2, dir2] : c_dir) {
                if (used.count(cid2) && cid2 != cid0) continue;
                if (cid2 == cur) continue;
                const Cell& c2 = cx.cells[static_cast<std::size_t>(cid2)];
                int tail2 = dir2 > 0 ? c2.ends[0] : c2.ends[1];
                if (tail2 == head) {
                    nxt = cid2;
                    break;
                }
            }
            if (nxt == -1 || nxt == cid0) break;
            cur = nxt;
        }
        pat.circles.push_back(std::move(circ));
    }
    return pat;
}

ComplexReport check_complex(const AttachedComplex& c) { return c.check(); }

ComplexReport AttachedComplex::check() const {
    ComplexReport r;
    r.cell_counts = counts();
    r.nonwhite_counts = counts_excluding(true, true);
    long chi = 0;
    for (int d = 0; d < 4; ++d)
        chi += (d % 2 == 0 ? 1 : -1) * static_cast<long>(r.cell_counts[static_cast<std::size_t>(d)]);
    r.euler = chi;

    r.boundary_squared_zero = true;
    for (int d = 2; d <= 3; ++d) {
        Mat<Int> a = boundary_matrix(d);
        Mat<Int> b = boundary_matrix(d - 1);
        if (!(b * a).is_zero()) r.boundary_squared_zero = false;
    }

    r.pattern_valid = true;
    try {
        BoundaryPattern p = boundary_pattern(*this);
        std::map<int, int> deg0;
        std::set<int> seen1;
        for (const auto& circ : p.circles) {
            for (int c0 : circ.cells_0) deg0[c0]++;
            for (int c1 : circ.cells_1)
                if (!seen1.insert(c1).second) r.pattern_valid = false;
        }
        for (const Cell& c : cells) {
            if (c.label != PatternLabel::Concave) continue;
            if (c.dim == 0 && deg0[c.id] != 1) r.pattern_valid = false;
            if (c.dim == 1 && !seen1.count(c.id)) r.pattern_valid = false;
        }
    } catch (const std::exception&) {
        r.pattern_valid = false;
    }

    long chi_wbar = 0, chi_c = 0;
    for (const Cell& c : cells) {
        int ind = (c.dim % 2 == 0) ? 1 : -1;
        if (c.label == PatternLabel::White || c.label == PatternLabel::Concave) chi_wbar += ind;
        if (c.label == PatternLabel::Concave) chi_c += ind;
    }
    r.euler_residue = chi - (chi_wbar - chi_c);
    return r;
}

std::string ComplexReport::summary() const {
    std::ostringstream os;
    os << "cells " << cell_counts[0] << "/" << cell_counts[1] << "/" << cell_counts[2] << "/" << cell_counts[3]
       << " nonwhite " << nonwhite_counts[0] << "/" << nonwhite_counts[1] << "/" << nonwhite_counts[2] << "/"
       << nonwhite_counts[3] << " chi " << euler << " d2zero " << (boundary_squared_zero ? "yes" : "no")
       << " pattern " << (pattern_valid ? "ok" : "BAD") << " residue " << euler_residue;
    return os.str();
}

std::string AttachedComplex::report_json() const {
    nlohmann::ordered_json j;
    j["mode"] = mode == SubdivisionMode::Economical ? "economical" : "full";
    j["x0"] = x0;
    auto kind_name = [](CellKind k) {
        switch (k) {
            case CellKind::X0: return "x0";
            case CellKind::Corner: return "corner";
            case CellKind::SubPoint: return "subpoint";
            case CellKind::Center: return "center";
            case CellKind::DualEdge: return "dual_edge";
            case CellKind::Cut: return "cut";
            case CellKind::CutHalf: return "cut_half";
            case CellKind::Seg: return "seg";
            case CellKind::DualFace: return "dual_face";
            case CellKind::BTri: return "btri";
            case CellKind::BPiece: return "bpiece";
            case CellKind::Kite: return "kite";
            case CellKind::DualTet: return "dual_tet";
        }
        return "?";
    };
    auto label_name = [](PatternLabel l) {
        switch (l) {
            case PatternLabel::Interior: return "int";
            case PatternLabel::White: return "W";
            case PatternLabel::Black: return "B";
            case PatternLabel::Concave: return "C";
            case PatternLabel::X0: return "x0";
        }
        return "?";
    };
    nlohmann::ordered_json cj = nlohmann::ordered_json::array();
    for (const Cell& c : cells) {
        nlohmann::ordered_json e;
        e["id"] = c.id;
        e["dim"] = c.dim;
        e["kind"] = kind_name(c.kind);
        e["label"] = label_name(c.label);
        e["key"] = {c.key[0], c.key[1], c.key[2]};
        nlohmann::ordered_json bnd = nlohmann::ordered_json::array();
        for (const Incidence& inc : c.boundary) {
            nlohmann::ordered_json b;
            b["face"] = inc.face;
            b["sign"] = inc.sign;
            nlohmann::ordered_json w = nlohmann::ordered_json::array();
            for (const WalkStep& s : inc.walk) w.push_back({s.one_cell, s.dir});
            b["walk"] = w;
            bnd.push_back(b);
        }
        e["boundary"] = bnd;
        cj.push_back(e);
    }
    j["cells"] = cj;
    return j.dump(1);
}

} // namespace spinetor
