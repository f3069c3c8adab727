#include "spinetor/triangulation.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

namespace spinetor {

Perm3 Perm3::from_word(const std::string& w) {
    if (w.size() != 3) throw TriError(TriError::Kind::Syntax, "permutation word must have 3 letters: " + w);
    Perm3 p;
    std::array<bool, 3> seen{false, false, false};
    for (int i = 0; i < 3; ++i) {
        char c = w[static_cast<std::size_t>(i)];
        if (c < '0' || c > '2') throw TriError(TriError::Kind::Syntax, "permutation letters must be 0,1,2: " + w);
        int v = c - '0';
        if (seen[static_cast<std::size_t>(v)]) throw TriError(TriError::Kind::Syntax, "permutation word not bijective: " + w);
        seen[static_cast<std::size_t>(v)] = true;
        p.img[static_cast<std::size_t>(i)] = v;
    }
    return p;
}

std::string Perm3::word() const {
    std::string s;
    for (int i = 0; i < 3; ++i) s += static_cast<char>('0' + img[static_cast<std::size_t>(i)]);
    return s;
}

Perm3 Perm3::inverse() const {
    Perm3 p;
    for (int i = 0; i < 3; ++i) p.img[static_cast<std::size_t>(img[static_cast<std::size_t>(i)])] = i;
    return p;
}

int Perm3::sign() const {
    int s = 1;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (img[static_cast<std::size_t>(i)] > img[static_cast<std::size_t>(j)]) s = -s;
    return s;
}

int edge_index(int a, int b) {
    if (a > b) std::swap(a, b);
    for (int e = 0; e < 6; ++e)
        if (kEdgePair[static_cast<std::size_t>(e)][0] == a && kEdgePair[static_cast<std::size_t>(e)][1] == b) return e;
    throw std::logic_error("bad edge pair");
}

std::array<int, 3> face_vertices(int f) {
    std::array<int, 3> v{};
    int k = 0;
    for (int i = 0; i < 4; ++i)
        if (i != f) v[static_cast<std::size_t>(k++)] = i;
    return v;
}

std::array<int, 2> BranchedTriangulation::oriented_edge(std::size_t t, int e) const {
    auto [a, b] = kEdgePair[static_cast<std::size_t>(e)];
    if (tets[t].edge_up[static_cast<std::size_t>(e)]) return {a, b};
    return {b, a};
}

std::array<int, 4> BranchedTriangulation::gluing_map(std::size_t t, int f) const {
    const FaceGluing& g = tets[t].glue[static_cast<std::size_t>(f)];
    if (!g.glued) throw std::logic_error("gluing_map on boundary face");
    std::array<int, 4> sigma{};
    auto fv = face_vertices(f);
    auto gv = face_vertices(g.face);
    for (int k = 0; k < 3; ++k) sigma[static_cast<std::size_t>(fv[static_cast<std::size_t>(k)])] = gv[static_cast<std::size_t>(g.perm[k])];
    sigma[static_cast<std::size_t>(f)] = g.face;
    return sigma;
}

namespace {

int perm4_sign(const std::array<int, 4>& p) {
    int s = 1;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (p[static_cast<std::size_t>(i)] > p[static_cast<std::size_t>(j)]) s = -s;
    return s;
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
};

} // namespace

bool BranchedTriangulation::all_faces_glued() const {
    for (const auto& t : tets)
        for (const auto& g : t.glue)
            if (!g.glued) return false;
    return true;
}

void BranchedTriangulation::validate() const {
    const std::size_t n = tets.size();
    if (n == 0) throw TriError(TriError::Kind::Structure, "empty triangulation");

    // Involutivity.
    for (std::size_t t = 0; t < n; ++t)
        for (int f = 0; f < 4; ++f) {
            const FaceGluing& g = tets[t].glue[static_cast<std::size_t>(f)];
            if (!g.glued) continue;
            if (g.tet < 0 || static_cast<std::size_t>(g.tet) >= n || g.face < 0 || g.face > 3)
                throw TriError(TriError::Kind::Structure,
                               "gluing target out of range at tet " + std::to_string(t) + " face " + std::to_string(f));
            const FaceGluing& h = tets[static_cast<std::size_t>(g.tet)].glue[static_cast<std::size_t>(g.face)];
            if (!h.glued || h.tet != static_cast<int>(t) || h.face != f || !(h.perm == g.perm.inverse()))
                throw TriError(TriError::Kind::Involution,
                               "non-involutive gluing at tet " + std::to_string(t) + " face " + std::to_string(f));
            if (g.tet == static_cast<int>(t) && g.face == f)
                throw TriError(TriError::Kind::Structure,
                               "face glued to itself at tet " + std::to_string(t) + " face " + std::to_string(f));
        }

    // Orientability: the tetrahedra are oriented by their branching orders, so
    // the gluing maps must be odd in branching-rank coordinates.
    {
        BranchingReport br0 = validate_branching(*this);
        if (!br0.pass) {
            for (std::size_t t = 0; t < br0.tets.size(); ++t)
                if (!br0.tets[t].ok)
                    throw TriError(TriError::Kind::Branching,
                                   "branching violation at tet " + std::to_string(t) + ": " + br0.tets[t].issue);
        }
        auto rank_perm_sign = [&](std::size_t t) {
            auto ord = vertex_order(t);
            std::array<int, 4> rho{};
            for (int r = 0; r < 4; ++r) rho[static_cast<std::size_t>(ord[static_cast<std::size_t>(r)])] = r;
            return perm4_sign(rho);
        };
        for (std::size_t t = 0; t < n; ++t)
            for (int f = 0; f < 4; ++f) {
                const FaceGluing& g = tets[t].glue[static_cast<std::size_t>(f)];
                if (!g.glued) continue;
                int s = perm4_sign(gluing_map(t, f)) * rank_perm_sign(t) *
                        rank_perm_sign(static_cast<std::size_t>(g.tet));
                if (s != -1)
                    throw TriError(TriError::Kind::Orientation,
                                   "orientation-preserving face identification at tet " + std::to_string(t) +
                                       " face " + std::to_string(f));
            }
    }

    // Edge orientations respected by every gluing.
    for (std::size_t t = 0; t < n; ++t)
        for (int f = 0; f < 4; ++f) {
            const FaceGluing& g = tets[t].glue[static_cast<std::size_t>(f)];
            if (!g.glued) continue;
            auto sigma = gluing_map(t, f);
            auto fv = face_vertices(f);
            for (int i = 0; i < 3; ++i)
                for (int j = i + 1; j < 3; ++j) {
                    int a = fv[static_cast<std::size_t>(i)], b = fv[static_cast<std::size_t>(j)];
                    auto oe = oriented_edge(t, edge_index(a, b));
                    std::array<int, 2> mapped{sigma[static_cast<std::size_t>(oe[0])], sigma[static_cast<std::size_t>(oe[1])]};
                    auto te = oriented_edge(static_cast<std::size_t>(g.tet),
                                            edge_index(mapped[0], mapped[1]));
                    if (te != mapped)
                        throw TriError(TriError::Kind::EdgeOrientation,
                                       "edge orientation mismatch across tet " + std::to_string(t) + " face " +
                                           std::to_string(f));
                }
        }

    // Branching.
    BranchingReport br = validate_branching(*this);
    if (!br.pass) {
        for (std::size_t t = 0; t < br.tets.size(); ++t)
            if (!br.tets[t].ok)
                throw TriError(TriError::Kind::Branching,
                               "branching violation at tet " + std::to_string(t) + ": " + br.tets[t].issue);
    }

    // Connectivity.
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
        std::size_t t = stack.back();
        stack.pop_back();
        for (int f = 0; f < 4; ++f) {
            const FaceGluing& g = tets[t].glue[static_cast<std::size_t>(f)];
            if (g.glued && !seen[static_cast<std::size_t>(g.tet)]) {
                seen[static_cast<std::size_t>(g.tet)] = true;
                stack.push_back(static_cast<std::size_t>(g.tet));
            }
        }
    }
    for (std::size_t t = 0; t < n; ++t)
        if (!seen[t]) throw TriError(TriError::Kind::Disconnected, "triangulation is disconnected (tet " + std::to_string(t) + ")");
}

std::array<int, 4> BranchedTriangulation::vertex_order(std::size_t t) const {
    std::array<int, 4> indeg{0, 0, 0, 0};
    for (int e = 0; e < 6; ++e) indeg[static_cast<std::size_t>(oriented_edge(t, e)[1])]++;
    std::array<int, 4> order{-1, -1, -1, -1};
    for (int v = 0; v < 4; ++v) {
        int d = indeg[static_cast<std::size_t>(v)];
        if (d < 0 || d > 3 || order[static_cast<std::size_t>(d)] != -1)
            throw std::logic_error("vertex_order on non-branched tet");
        order[static_cast<std::size_t>(d)] = v;
    }
    return order;
}

BranchingReport validate_branching(const BranchedTriangulation& tri) {
    BranchingReport rep;
    rep.pass = true;
    rep.tets.resize(tri.size());
    for (std::size_t t = 0; t < tri.size(); ++t) {
        auto& r = rep.tets[t];
        std::array<int, 4> indeg{0, 0, 0, 0}, outdeg{0, 0, 0, 0};
        for (int e = 0; e < 6; ++e) {
            auto oe = tri.oriented_edge(t, e);
            outdeg[static_cast<std::size_t>(oe[0])]++;
            indeg[static_cast<std::size_t>(oe[1])]++;
        }
        int sources = 0, sinks = 0;
        for (int v = 0; v < 4; ++v) {
            if (indeg[static_cast<std::size_t>(v)] == 0) { sources++; r.source = v; }
            if (outdeg[static_cast<std::size_t>(v)] == 0) { sinks++; r.sink = v; }
        }
        bool face_ok = true;
        int bad_face = -1;
        for (int f = 0; f < 4 && face_ok; ++f) {
            auto fv = face_vertices(f);
            // A face is branched iff its 3 oriented edges are not a cycle.
            std::array<int, 3> fin{0, 0, 0};
            for (int i = 0; i < 3; ++i)
                for (int j = i + 1; j < 3; ++j) {
                    auto oe = tri.oriented_edge(t, edge_index(fv[static_cast<std::size_t>(i)], fv[static_cast<std::size_t>(j)]));
                    for (int k = 0; k < 3; ++k)
                        if (fv[static_cast<std::size_t>(k)] == oe[1]) fin[static_cast<std::size_t>(k)]++;
                }
            bool has0 = false, has2 = false;
            for (int k = 0; k < 3; ++k) {
                if (fin[static_cast<std::size_t>(k)] == 0) has0 = true;
                if (fin[static_cast<std::size_t>(k)] == 2) has2 = true;
            }
            if (!has0 || !has2) { face_ok = false; bad_face = f; }
        }
        r.ok = (sources == 1 && sinks == 1 && face_ok);
        if (!r.ok) {
            std::ostringstream os;
            if (sources != 1) os << sources << " sources";
            if (sinks != 1) os << (os.str().empty() ? "" : ", ") << sinks << " sinks";
            if (!face_ok) os << (os.str().empty() ? "" : ", ") << "cyclically oriented face " << bad_face;
            r.issue = os.str();
            rep.pass = false;
        }
    }
    return rep;
}

void BranchedTriangulation::build_classes() {
    const std::size_t n = tets.size();
    UnionFind edges(6 * n), verts(4 * n);
    std::size_t glued_pairs = 0;
    for (std::size_t t = 0; t < n; ++t)
        for (int f = 0; f < 4; ++f) {
            const FaceGluing& g = tets[t].glue[static_cast<std::size_t>(f)];
            if (!g.glued) continue;
            glued_pairs++;
            auto sigma = gluing_map(t, f);
            auto fv = face_vertices(f);
            for (int k = 0; k < 3; ++k) {
                int v = fv[static_cast<std::size_t>(k)];
                verts.unite(static_cast<int>(t) * 4 + v, g.tet * 4 + sigma[static_cast<std::size_t>(v)]);
            }
            for (int i = 0; i < 3; ++i)
                for (int j = i + 1; j < 3; ++j) {
                    int a = fv[static_cast<std::size_t>(i)], b = fv[static_cast<std::size_t>(j)];
                    edges.unite(static_cast<int>(t) * 6 + edge_index(a, b),
                                g.tet * 6 + edge_index(sigma[static_cast<std::size_t>(a)], sigma[static_cast<std::size_t>(b)]));
                }
        }
    n_face_classes = glued_pairs / 2;
    edge_class_ids.resize(6 * n);
    vertex_class_ids.resize(4 * n);
    std::map<int, int> emap, vmap;
    for (std::size_t i = 0; i < 6 * n; ++i) {
        int r = edges.find(static_cast<int>(i));
        auto [it, inserted] = emap.emplace(r, static_cast<int>(emap.size()));
        edge_class_ids[i] = it->second;
    }
    for (std::size_t i = 0; i < 4 * n; ++i) {
        int r = verts.find(static_cast<int>(i));
        auto [it, inserted] = vmap.emplace(r, static_cast<int>(vmap.size()));
        vertex_class_ids[i] = it->second;
    }
    n_edge_classes = emap.size();
    n_vertex_classes = vmap.size();
}

std::string BranchedTriangulation::serialize() const {
    std::ostringstream os;
    os << "tets " << tets.size() << "\n";
    for (std::size_t t = 0; t < tets.size(); ++t) {
        for (int f = 0; f < 4; ++f) {
            const FaceGluing& g = tets[t].glue[static_cast<std::size_t>(f)];
            os << "face " << t << " " << f << " -> ";
            if (g.glued)
                os << g.tet << " " << g.face << " " << g.perm.word() << "\n";
            else
                os << "boundary\n";
        }
        os << "edges " << t << ":";
        for (int e = 0; e < 6; ++e) os << " " << (tets[t].edge_up[static_cast<std::size_t>(e)] ? "+" : "-");
        os << "\n";
    }
    return os.str();
}

BranchedTriangulation parse_triangulation(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    BranchedTriangulation tri;
    long ntets = -1;
    std::vector<std::array<bool, 4>> face_seen;
    std::vector<bool> edges_seen;

    auto fail = [&](const std::string& msg) -> void { throw TriError(TriError::Kind::Syntax, msg + " (line " + std::to_string(lineno) + ")", lineno); };

    while (std::getline(in, line)) {
        lineno++;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok == "tets") {
            if (ntets >= 0) fail("duplicate tets header");
            if (!(ls >> ntets) || ntets <= 0) fail("bad tetrahedron count");
            tri.tets.resize(static_cast<std::size_t>(ntets));
            face_seen.assign(static_cast<std::size_t>(ntets), {false, false, false, false});
            edges_seen.assign(static_cast<std::size_t>(ntets), false);
        } else if (tok == "face") {
            if (ntets < 0) fail("face line before tets header");
            long t, f;
            std::string arrow;
            if (!(ls >> t >> f >> arrow) || arrow != "->") fail("malformed face line");
            if (t < 0 || t >= ntets || f < 0 || f > 3) fail("face indices out of range");
            if (face_seen[static_cast<std::size_t>(t)][static_cast<std::size_t>(f)]) fail("duplicate face line");
            face_seen[static_cast<std::size_t>(t)][static_cast<std::size_t>(f)] = true;
            std::string nxt;
            if (!(ls >> nxt)) fail("malformed face target");
            FaceGluing g;
            if (nxt == "boundary") {
                g.glued = false;
            } else {
                long j, gface;
                std::string word;
                try {
                    j = std::stol(nxt);
                } catch (...) {
                    fail("malformed face target");
                    j = 0;
                }
                if (!(ls >> gface >> word)) fail("malformed face target");
                if (j < 0 || j >= ntets || gface < 0 || gface > 3) fail("gluing target out of range");
                g.glued = true;
                g.tet = static_cast<int>(j);
                g.face = static_cast<int>(gface);
                try {
                    g.perm = Perm3::from_word(word);
                } catch (const TriError& e) {
                    fail(e.what());
                }
            }
            tri.tets[static_cast<std::size_t>(t)].glue[static_cast<std::size_t>(f)] = g;
        } else if (tok == "edges") {
            if (ntets < 0) fail("edges line before tets header");
            std::string th;
            if (!(ls >> th)) fail("malformed edges line");
            if (!th.empty() && th.back() == ':') th.pop_back();
            long t;
            try {
                t = std::stol(th);
            } catch (...) {
                fail("malformed edges index");
                t = 0;
            }
            if (t < 0 || t >= ntets) fail("edges index out of range");
            if (edges_seen[static_cast<std::size_t>(t)]) fail("duplicate edges line");
            edges_seen[static_cast<std::size_t>(t)] = true;
            for (int e = 0; e < 6; ++e) {
                std::string s;
                if (!(ls >> s) || (s != "+" && s != "-")) fail("edge orientations must be six +/- tokens");
                tri.tets[static_cast<std::size_t>(t)].edge_up[static_cast<std::size_t>(e)] = (s == "+");
            }
        } else {
            fail("unrecognized directive '" + tok + "'");
        }
    }
    if (ntets < 0) throw TriError(TriError::Kind::Syntax, "empty document: missing tets header", lineno);
    for (long t = 0; t < ntets; ++t) {
        for (int f = 0; f < 4; ++f)
            if (!face_seen[static_cast<std::size_t>(t)][static_cast<std::size_t>(f)])
                throw TriError(TriError::Kind::Syntax, "missing face line for tet " + std::to_string(t) + " face " + std::to_string(f));
        if (!edges_seen[static_cast<std::size_t>(t)])
            throw TriError(TriError::Kind::Syntax, "missing edges line for tet " + std::to_string(t));
    }
    tri.validate();
    tri.build_classes();
    return tri;
}

SpineComplex dual_spine(const BranchedTriangulation& tri) {
    SpineComplex sp;
    sp.n_vertices = tri.size();
    sp.n_edges = tri.n_face_classes;
    sp.n_regions = tri.n_edge_classes;
    sp.region_of_class.assign(tri.n_edge_classes, -1);

    // Faces of a tet containing edge e (= not opposite either endpoint).
    auto faces_of_edge = [](int e) {
        auto [a, b] = kEdgePair[static_cast<std::size_t>(e)];
        std::array<int, 2> fs{};
        int k = 0;
        for (int v = 0; v < 4; ++v)
            if (v != a && v != b) fs[static_cast<std::size_t>(k++)] = v;
        return fs;  // faces opposite the complementary vertices
    };

    std::vector<bool> visited(tri.size() * 6, false);
    for (std::size_t t0 = 0; t0 < tri.size(); ++t0)
        for (int e0 = 0; e0 < 6; ++e0) {
            if (visited[t0 * 6 + static_cast<std::size_t>(e0)]) continue;
            int cls = tri.edge_class(t0, e0);
            if (sp.region_of_class[static_cast<std::size_t>(cls)] != -1) continue;
            SpineComplex::EdgeRing ring;
            // Walk around the edge class; a tet-edge may appear twice (both
            // entry faces), so the walk state includes the entry face.
            std::size_t t = t0;
            int e = e0;
            int entry_face = faces_of_edge(e)[0];
            const std::size_t start_t = t0;
            const int start_e = e0, start_entry = entry_face;
            do {
                auto fs = faces_of_edge(e);
                int exit_face = (fs[0] == entry_face) ? fs[1] : fs[0];
                ring.steps.push_back({static_cast<int>(t), e, exit_face});
                visited[t * 6 + static_cast<std::size_t>(e)] = true;
                const FaceGluing& g = tri.tets[t].glue[static_cast<std::size_t>(exit_face)];
                if (!g.glued) throw TriError(TriError::Kind::Structure, "edge ring hits a boundary face");
                auto sigma = tri.gluing_map(t, exit_face);
                auto [a, b] = kEdgePair[static_cast<std::size_t>(e)];
                int e2 = edge_index(sigma[static_cast<std::size_t>(a)], sigma[static_cast<std::size_t>(b)]);
                t = static_cast<std::size_t>(g.tet);
                e = e2;
                entry_face = g.face;
            } while (!(t == start_t && e == start_e && entry_face == start_entry));
            sp.region_of_class[static_cast<std::size_t>(cls)] = static_cast<int>(sp.region_rings.size());
            sp.region_rings.push_back(std::move(ring));
        }
    return sp;
}

} // namespace spinetor
