#include "spinetor/digger.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace spinetor {

std::string KnotDiagram::serialize() const {
    std::ostringstream os;
    os << "knot on " << (spine_name.empty() ? "spine" : spine_name) << "\n";
    for (const KnotEvent& e : events) {
        switch (e.type) {
            case KnotEvent::Type::Arc:
                os << "arc R" << e.region << " " << e.slot << "\n";
                break;
            case KnotEvent::Type::EdgeCross:
                os << "cross E" << e.edge << "\n";
                break;
            case KnotEvent::Type::SelfCross:
                os << "x " << e.xing << " " << (e.over ? "over" : "under") << " " << (e.sign > 0 ? "+" : "-")
                   << "\n";
                break;
        }
    }
    return os.str();
}

KnotDiagram parse_diagram(const std::string& text) {
    KnotDiagram d;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool have_header = false;
    auto fail = [&](const std::string& m) -> void {
        throw DigError(m + " (line " + std::to_string(lineno) + ")");
    };
    while (std::getline(in, line)) {
        lineno++;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok == "knot") {
            std::string on;
            if (!(ls >> on) || on != "on" || !(ls >> d.spine_name)) fail("malformed knot header");
            have_header = true;
        } else if (tok == "arc") {
            KnotEvent e;
            e.type = KnotEvent::Type::Arc;
            std::string r;
            if (!(ls >> r) || r.size() < 2 || r[0] != 'R') fail("malformed arc event");
            e.region = std::stoi(r.substr(1));
            if (!(ls >> e.slot)) fail("arc event needs an exit slot");
            d.events.push_back(e);
        } else if (tok == "cross") {
            KnotEvent e;
            e.type = KnotEvent::Type::EdgeCross;
            std::string s;
            if (!(ls >> s) || s.size() < 2 || s[0] != 'E') fail("malformed cross event");
            e.edge = std::stoi(s.substr(1));
            d.events.push_back(e);
        } else if (tok == "x") {
            KnotEvent e;
            e.type = KnotEvent::Type::SelfCross;
            std::string ou, sg;
            if (!(ls >> e.xing >> ou)) fail("malformed x event");
            if (ou != "over" && ou != "under") fail("x event needs over|under");
            e.over = (ou == "over");
            if (!(ls >> sg) || (sg != "+" && sg != "-")) fail("x event needs a sign");
            e.sign = (sg == "+") ? 1 : -1;
            d.events.push_back(e);
        } else {
            fail("unrecognized diagram directive '" + tok + "'");
        }
    }
    if (!have_header) throw DigError("diagram lacks its knot header");
    if (d.events.empty()) throw DigError("diagram has no events");
    return d;
}

KnotDiagram add_double_curl(const KnotDiagram& d, int sign, int site) {
    if (site < 0 || static_cast<std::size_t>(site) >= d.events.size() ||
        d.events[static_cast<std::size_t>(site)].type != KnotEvent::Type::Arc)
        throw DigError("double curl site must be a region arc");
    const KnotEvent& arc = d.events[static_cast<std::size_t>(site)];
    int next_id = 0;
    for (const KnotEvent& e : d.events)
        if (e.type == KnotEvent::Type::SelfCross) next_id = std::max(next_id, e.xing + 1);
    KnotDiagram out = d;
    // Two opposite-writhe kinks traversed back to back: each crossing is met
    // twice in a row, the lobe between the passages staying inside the arc's
    // region. The pattern preserves the framing and shifts the winding by one.
    auto mk = [&](int id, bool over, int s) {
        KnotEvent e;
        e.type = KnotEvent::Type::SelfCross;
        e.xing = id;
        e.over = over;
        e.sign = s;
        return e;
    };
    auto mkarc = [&]() {
        KnotEvent e = arc;
        return e;
    };
    std::vector<KnotEvent> ins;
    if (sign > 0) {
        ins = {mk(next_id, true, +1),  mkarc(), mk(next_id, false, +1), mkarc(),
               mk(next_id + 1, false, -1), mkarc(), mk(next_id + 1, true, -1), mkarc()};
    } else {
        ins = {mk(next_id, false, -1), mkarc(), mk(next_id, true, -1), mkarc(),
               mk(next_id + 1, true, +1), mkarc(), mk(next_id + 1, false, +1), mkarc()};
    }
    out.events.insert(out.events.begin() + site + 1, ins.begin(), ins.end());
    return out;
}

namespace {

struct Stub {
    int tet = -1;
    int face = -1;
};

// Resolves the gluing permutation that matches branching orders on both
// faces; the only candidate compatible with the edge orientations.
void glue_forced(BranchedTriangulation& tri, int t1, int f1, int t2, int f2) {
    auto order_of = [&](int t, int f) {
        auto fv = face_vertices(f);
        auto rank = [&](int v) {
            auto ord = tri.vertex_order(static_cast<std::size_t>(t));
            for (int i = 0; i < 4; ++i)
                if (ord[static_cast<std::size_t>(i)] == v) return i;
            return -1;
        };
        std::array<int, 3> vs = fv;
        std::sort(vs.begin(), vs.end(), [&](int a, int b) { return rank(a) < rank(b); });
        return vs;
    };
    auto o1 = order_of(t1, f1);
    auto o2 = order_of(t2, f2);
    // Permutation in positional terms: ascending labels of f1 -> positions of
    // ascending labels of f2 such that branching ranks correspond.
    auto asc1 = face_vertices(f1);
    auto asc2 = face_vertices(f2);
    Perm3 p;
    for (int k = 0; k < 3; ++k) {
        // ascending vertex asc1[k]: its branching position i in o1; target is o2[i].
        int i = -1;
        for (int j = 0; j < 3; ++j)
            if (o1[static_cast<std::size_t>(j)] == asc1[static_cast<std::size_t>(k)]) i = j;
        int tv = o2[static_cast<std::size_t>(i)];
        int pos = -1;
        for (int j = 0; j < 3; ++j)
            if (asc2[static_cast<std::size_t>(j)] == tv) pos = j;
        p.img[static_cast<std::size_t>(k)] = pos;
    }
    // Orientability in branching-rank coordinates; fail fast otherwise.
    {
        std::array<int, 4> sigma{};
        auto fv1 = face_vertices(f1);
        for (int k = 0; k < 3; ++k) sigma[static_cast<std::size_t>(fv1[static_cast<std::size_t>(k)])] =
            face_vertices(f2)[static_cast<std::size_t>(p[k])];
        sigma[static_cast<std::size_t>(f1)] = f2;
        auto psign = [](const std::array<int, 4>& q) {
            int s = 1;
            for (int i = 0; i < 4; ++i)
                for (int j = i + 1; j < 4; ++j)
                    if (q[static_cast<std::size_t>(i)] > q[static_cast<std::size_t>(j)]) s = -s;
            return s;
        };
        auto rho_sign = [&](int t) {
            auto ord = tri.vertex_order(static_cast<std::size_t>(t));
            std::array<int, 4> rho{};
            for (int r = 0; r < 4; ++r) rho[static_cast<std::size_t>(ord[static_cast<std::size_t>(r)])] = r;
            return psign(rho);
        };
        if (psign(sigma) * rho_sign(t1) * rho_sign(t2) != -1)
            throw DigError("local model produces an orientation-preserving identification");
    }
    FaceGluing g1;
    g1.glued = true;
    g1.tet = t2;
    g1.face = f2;
    g1.perm = p;
    tri.tets[static_cast<std::size_t>(t1)].glue[static_cast<std::size_t>(f1)] = g1;
    FaceGluing g2;
    g2.glued = true;
    g2.tet = t1;
    g2.face = f1;
    g2.perm = p.inverse();
    tri.tets[static_cast<std::size_t>(t2)].glue[static_cast<std::size_t>(f2)] = g2;
}

// Wing slot of a face class: which of ab / bc / ac the given tet-edge is,
// seen from side (t,f): 0 = ab (the flap), 1 = bc, 2 = ac.
int wing_type(const BranchedTriangulation& base, int t, int f, int e) {
    auto [x, y] = kEdgePair[static_cast<std::size_t>(e)];
    // Order the face's vertices by branching rank.
    auto ord = base.vertex_order(static_cast<std::size_t>(t));
    auto rank = [&](int v) {
        for (int i = 0; i < 4; ++i)
            if (ord[static_cast<std::size_t>(i)] == v) return i;
        return -1;
    };
    auto fv = face_vertices(f);
    std::array<int, 3> vs = fv;
    std::sort(vs.begin(), vs.end(), [&](int a, int b) { return rank(a) < rank(b); });
    int a = vs[0], b = vs[1], c = vs[2];
    auto same = [&](int p, int q) { return (x == p && y == q) || (x == q && y == p); };
    if (same(a, b)) return 0;
    if (same(b, c)) return 1;
    if (same(a, c)) return 2;
    return -1;
}

} // namespace

DigResult dig_tunnel(const BranchedTriangulation& spine, const KnotDiagram& d, const DigConventions& conv) {
    spine.validate();
    SpineComplex sp = dual_spine(spine);

    // Expand the cyclic event list into an alternating arc / crossing walk.
    const auto& ev = d.events;
    const std::size_t n = ev.size();
    if (n == 0) throw DigError("empty diagram");
    std::size_t n_cross = 0;
    for (const auto& e : ev)
        if (e.type != KnotEvent::Type::Arc) n_cross++;
    if (n_cross == 0)
        throw DigError("non-standard result: the projection never meets the singular set and has no crossings");
    for (std::size_t i = 0; i < n; ++i) {
        bool a1 = ev[i].type == KnotEvent::Type::Arc;
        bool a2 = ev[(i + 1) % n].type == KnotEvent::Type::Arc;
        if (a1 == a2)
            throw DigError("invalid diagram: arcs and crossing events must alternate");
    }
    // Self-crossings appear exactly twice with opposite over/under, same sign.
    std::map<int, std::vector<std::size_t>> xing_at;
    for (std::size_t i = 0; i < n; ++i)
        if (ev[i].type == KnotEvent::Type::SelfCross) xing_at[ev[i].xing].push_back(i);
    for (const auto& [id, occ] : xing_at) {
        if (occ.size() != 2) throw DigError("invalid diagram: crossing " + std::to_string(id) + " must occur twice");
        if (ev[occ[0]].over == ev[occ[1]].over)
            throw DigError("invalid diagram: crossing " + std::to_string(id) + " needs one over and one under pass");
        if (ev[occ[0]].sign != ev[occ[1]].sign)
            throw DigError("invalid diagram: crossing " + std::to_string(id) + " has inconsistent signs");
    }

    DigResult res;
    res.output = spine;  // old tetrahedra keep their data; gluings rewired below
    auto& out = res.output;

    auto new_tet = [&](const std::string& origin) {
        Tetra t;
        for (int e = 0; e < 6; ++e) t.edge_up[static_cast<std::size_t>(e)] = true;  // chambers pre-sorted by height
        out.tets.push_back(t);
        int id = static_cast<int>(out.tets.size()) - 1;
        res.tet_origin[id] = origin;
        return id;
    };

    // Per crossing event: the four feet stubs in strand order.
    struct EventStubs {
        Stub left_before, left_after, right_before, right_after;
    };
    std::map<std::size_t, EventStubs> stubs;

    // Edge-crossing bookkeeping for the old-gluing chains.
    struct EdgeHit {
        int face_class_rep_t, face_class_rep_f;  // canonical side of the crossed face
        Stub toward_rep, toward_other;           // outward epsilon faces of the block
        std::size_t event_index;
    };
    std::map<long, std::vector<EdgeHit>> hits;  // key: canonical face side id

    // Pending self-crossings: first passage waits for the second.
    struct HalfXing {
        std::size_t index;
        bool over;
        int sign;
        std::array<int, 4> tets{-1, -1, -1, -1};  // V1..V4 once built
    };
    std::map<int, HalfXing> half;

    std::size_t edge_event_count = 0;
    auto arc_before = [&](std::size_t i) {
        return ev[(i + n - 1) % n];
    };
    auto arc_after = [&](std::size_t i) { return ev[(i + 1) % n]; };

    for (std::size_t i = 0; i < n; ++i) {
        const KnotEvent& e = ev[i];
        if (e.type == KnotEvent::Type::Arc) continue;

        if (e.type == KnotEvent::Type::EdgeCross) {
            const KnotEvent& a_prev = arc_before(i);
            const KnotEvent& a_next = arc_after(i);
            if (a_prev.region < 0 || a_next.region < 0) throw DigError("edge crossing without flanking arcs");
            if (a_prev.region >= static_cast<int>(sp.region_rings.size()))
                throw DigError("invalid diagram: unknown region R" + std::to_string(a_prev.region));
            const auto& ring = sp.region_rings[static_cast<std::size_t>(a_prev.region)];
            if (a_prev.slot < 0 || a_prev.slot >= static_cast<int>(ring.steps.size()))
                throw DigError("invalid diagram: arc slot out of range");
            auto step = ring.steps[static_cast<std::size_t>(a_prev.slot)];
            int t_exit = step.tet, f_exit = step.exit_face;
            const FaceGluing& g = spine.tets[static_cast<std::size_t>(t_exit)].glue[static_cast<std::size_t>(f_exit)];
            // The crossed spine edge must match the event.
            long side_a = static_cast<long>(t_exit) * 4 + f_exit;
            long side_b = static_cast<long>(g.tet) * 4 + g.face;
            long canonical = std::min(side_a, side_b);
            // Identify the face class id (for the event label): count classes the same way.
            // The event's edge id refers to the face-class index assigned by dual_spine
            // ordering, which matches the triangulation's glued-pair enumeration.
            // Validate via edge class of the crossed face: compare with e.edge.
            // The spine-edge enumeration: canonical sides sorted.
            // Build the list lazily:
            static thread_local std::map<const BranchedTriangulation*, std::map<long, int>> face_ids;
            auto& fid = face_ids[&spine];
            if (fid.empty()) {
                std::set<long> canon;
                for (std::size_t t = 0; t < spine.size(); ++t)
                    for (int f = 0; f < 4; ++f) {
                        const FaceGluing& gg = spine.tets[t].glue[static_cast<std::size_t>(f)];
                        long me = static_cast<long>(t) * 4 + f;
                        long ot = static_cast<long>(gg.tet) * 4 + gg.face;
                        canon.insert(std::min(me, ot));
                    }
                int k = 0;
                for (long c : canon) fid[c] = k++;
            }
            if (fid.at(canonical) != e.edge)
                throw DigError("invalid diagram: arc slot exits through spine edge E" +
                               std::to_string(fid.at(canonical)) + ", event says E" + std::to_string(e.edge));
            // Wing types: the exit wing and the entry wing must be opposite sides
            // (one of them bc, the other ab or ac); the tunnel needs the flap
            // below, which means neither walked wing may be the flap (ab).
            int wt_exit = wing_type(spine, t_exit, f_exit, step.edge);
            // Entry wing: a ring step of the next region crossing this face class.
            const auto& ring2 = sp.region_rings[static_cast<std::size_t>(a_next.region)];
            int wt_enter = -1;
            int found = 0;
            for (const auto& st2 : ring2.steps) {
                const FaceGluing& g2 = spine.tets[static_cast<std::size_t>(st2.tet)].glue[static_cast<std::size_t>(st2.exit_face)];
                long sa = static_cast<long>(st2.tet) * 4 + st2.exit_face;
                long sb = static_cast<long>(g2.tet) * 4 + g2.face;
                if (std::min(sa, sb) != canonical) continue;
                int wt = wing_type(spine, st2.tet, st2.exit_face, st2.edge);
                if (wt != wt_exit) {
                    wt_enter = wt;
                    found++;
                }
            }
            if (wt_enter == -1) throw DigError("invalid diagram: entry region does not meet the crossed edge");
            bool through_ok = (wt_exit == 1 && wt_enter == 2) || (wt_exit == 2 && wt_enter == 1);
            if (!through_ok)
                throw DigError("invalid diagram: crossing E" + std::to_string(e.edge) +
                               " is blocked by the branch sheet");

            int T_l = new_tet("edge crossing E" + std::to_string(e.edge) + " left");
            int T_r = new_tet("edge crossing E" + std::to_string(e.edge) + " right");
            res.event_tets.push_back({T_l, T_r});
            res.strand_tets.push_back(T_l);
            res.strand_tets.push_back(T_r);

            std::size_t variant = edge_event_count % conv.edge_left.size();
            edge_event_count++;
            const auto& tl = conv.edge_left[variant];
            const auto& tr = conv.edge_right[variant];
            EventStubs es;
            es.left_before = {T_l, tl[2]};
            es.left_after = {T_l, tl[3]};
            es.right_before = {T_r, tr[2]};
            es.right_after = {T_r, tr[3]};
            stubs[i] = es;

            glue_forced(out, T_l, tl[1], T_r, tr[1]);

            EdgeHit hit;
            hit.event_index = i;
            hit.face_class_rep_t = static_cast<int>(canonical / 4);
            hit.face_class_rep_f = static_cast<int>(canonical % 4);
            bool exit_is_rep = (side_a == canonical);
            // The left foot crosses on the exit tet's side when the convention
            // says so; outward faces follow.
            Stub left_out{T_l, tl[0]}, right_out{T_r, tr[0]};
            Stub toward_exit = conv.left_toward_current ? left_out : right_out;
            Stub toward_other = conv.left_toward_current ? right_out : left_out;
            hit.toward_rep = exit_is_rep ? toward_exit : toward_other;
            hit.toward_other = exit_is_rep ? toward_other : toward_exit;
            hits[canonical].push_back(hit);
            continue;
        }

        // Self crossing.
        auto it = half.find(e.xing);
        if (it == half.end()) {
            HalfXing h;
            h.index = i;
            h.over = e.over;
            h.sign = e.sign;
            // Build the four tets now; wire the second passage when it comes.
            for (int k = 0; k < 4; ++k)
                h.tets[static_cast<std::size_t>(k)] = new_tet("crossing " + std::to_string(e.xing) + " corner " + std::to_string(k));
            res.event_tets.push_back({h.tets[0], h.tets[1], h.tets[2], h.tets[3]});
            res.strand_tets.insert(res.strand_tets.end(), h.tets.begin(), h.tets.end());
            // Corners V1..V4 = tets[0..3] at (-,+),(-,-),(+,+),(+,-) in block
            // coordinates (under strand +x, over axis y). V1,V4 carry type 0,
            // V2,V3 type 1. Internal gluings: overpass pairs along the over
            // axis, under-segment pairs along the under axis.
            auto type_of = [&](int k2) { return (k2 == 0 || k2 == 3) ? conv.x_type0 : conv.x_type1; };
            glue_forced(out, h.tets[0], type_of(0)[0], h.tets[1], type_of(1)[0]);
            glue_forced(out, h.tets[2], type_of(2)[0], h.tets[3], type_of(3)[0]);
            glue_forced(out, h.tets[0], type_of(0)[3], h.tets[2], type_of(2)[3]);
            glue_forced(out, h.tets[1], type_of(1)[3], h.tets[3], type_of(3)[3]);
            half.emplace(e.xing, h);
            it = half.find(e.xing);
        }
        HalfXing& h = it->second;
        bool mirrored = (e.sign < 0);
        auto face_of = [&](int k2, int role) {
            return (k2 == 0 || k2 == 3) ? conv.x_type0[static_cast<std::size_t>(role)]
                                        : conv.x_type1[static_cast<std::size_t>(role)];
        };
        EventStubs es;
        if (e.over) {
            // Positive sign: over runs +y, its left foot is x=-wA: before V2,
            // after V1; right foot before V4, after V3. Negative sign mirrors.
            if (!mirrored) {
                es.left_before = {h.tets[1], face_of(1, 1)};
                es.left_after = {h.tets[0], face_of(0, 1)};
                es.right_before = {h.tets[3], face_of(3, 1)};
                es.right_after = {h.tets[2], face_of(2, 1)};
            } else {
                es.left_before = {h.tets[2], face_of(2, 1)};
                es.left_after = {h.tets[3], face_of(3, 1)};
                es.right_before = {h.tets[0], face_of(0, 1)};
                es.right_after = {h.tets[1], face_of(1, 1)};
            }
        } else {
            // Under strand runs +x in block coordinates regardless of sign.
            es.left_before = {h.tets[0], face_of(0, 2)};
            es.left_after = {h.tets[2], face_of(2, 2)};
            es.right_before = {h.tets[1], face_of(1, 2)};
            es.right_after = {h.tets[3], face_of(3, 2)};
        }
        stubs[i] = es;
    }

    // Feet wiring between consecutive crossing events.
    std::vector<std::size_t> cross_order;
    for (std::size_t i = 0; i < n; ++i)
        if (ev[i].type != KnotEvent::Type::Arc) cross_order.push_back(i);
    for (std::size_t k = 0; k < cross_order.size(); ++k) {
        std::size_t a = cross_order[k];
        std::size_t b = cross_order[(k + 1) % cross_order.size()];
        const EventStubs& sa = stubs.at(a);
        const EventStubs& sb = stubs.at(b);
        bool swap = k < conv.feet_swap.size() && conv.feet_swap[k] != 0;
        const Stub& lb = swap ? sb.right_before : sb.left_before;
        const Stub& rb = swap ? sb.left_before : sb.right_before;
        glue_forced(out, sa.left_after.tet, sa.left_after.face, lb.tet, lb.face);
        glue_forced(out, sa.right_after.tet, sa.right_after.face, rb.tet, rb.face);
    }

    // Old-edge rewiring: chain the edge-crossing blocks along each crossed face.
    for (const auto& [canonical, hh] : hits) {
        int tA = static_cast<int>(canonical / 4), fA = static_cast<int>(canonical % 4);
        const FaceGluing& g = spine.tets[static_cast<std::size_t>(tA)].glue[static_cast<std::size_t>(fA)];
        int tB = g.tet, fB = g.face;
        glue_forced(out, tA, fA, hh.front().toward_rep.tet, hh.front().toward_rep.face);
        for (std::size_t k = 0; k + 1 < hh.size(); ++k)
            glue_forced(out, hh[k].toward_other.tet, hh[k].toward_other.face, hh[k + 1].toward_rep.tet,
                        hh[k + 1].toward_rep.face);
        glue_forced(out, hh.back().toward_other.tet, hh.back().toward_other.face, tB, fB);
    }

    try {
        out.validate();
        out.build_classes();
    } catch (const TriError& err) {
        throw DigError(std::string("non-standard or invalid dig result: ") + err.what());
    }
    return res;
}

} // namespace spinetor
