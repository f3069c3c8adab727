#include "spinetor/homology.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <sstream>

namespace spinetor {

H1Class H1Class::zero(std::size_t k, std::size_t ntor) {
    H1Class c;
    c.free.assign(k, Int(0));
    c.tor.assign(ntor, Int(0));
    return c;
}

namespace {
Int mod_pos(const Int& a, const Int& m) {
    Int q = Int::fdiv_q(a, m);
    return a - q * m;
}
} // namespace

H1Class H1Class::plus(const H1Class& o, const std::vector<Int>& tor_orders) const {
    H1Class c(*this);
    for (std::size_t i = 0; i < c.free.size(); ++i) c.free[i] += o.free[i];
    for (std::size_t i = 0; i < c.tor.size(); ++i) c.tor[i] = mod_pos(c.tor[i] + o.tor[i], tor_orders[i]);
    return c;
}

H1Class H1Class::minus(const H1Class& o, const std::vector<Int>& tor_orders) const {
    H1Class c(*this);
    for (std::size_t i = 0; i < c.free.size(); ++i) c.free[i] -= o.free[i];
    for (std::size_t i = 0; i < c.tor.size(); ++i) c.tor[i] = mod_pos(c.tor[i] - o.tor[i], tor_orders[i]);
    return c;
}

bool H1Class::is_zero() const {
    for (const Int& x : free)
        if (!x.is_zero()) return false;
    for (const Int& x : tor)
        if (!x.is_zero()) return false;
    return true;
}

std::string H1Class::str() const {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < free.size(); ++i) os << (i ? "," : "") << free[i];
    os << ")";
    if (!tor.empty()) {
        os << "+tor(";
        for (std::size_t i = 0; i < tor.size(); ++i) os << (i ? "," : "") << tor[i];
        os << ")";
    }
    return os.str();
}

std::vector<Int> solve_unimodular(const Mat<Int>& v, const std::vector<Int>& y) {
    // Solve V x = y by fraction-free elimination; V square unimodular.
    const std::size_t n = v.rows();
    if (v.cols() != n || y.size() != n) throw std::invalid_argument("solve_unimodular shape");
    Mat<Rat> a(n, n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a(i, j) = Rat(v(i, j));
        a(i, n) = Rat(y[i]);
    }
    for (std::size_t col = 0, row = 0; col < n && row < n; ++col) {
        std::size_t p = row;
        while (p < n && a(p, col).is_zero()) ++p;
        if (p == n) throw std::runtime_error("solve_unimodular: singular");
        if (p != row)
            for (std::size_t j = 0; j <= n; ++j) std::swap(a(row, j), a(p, j));
        Rat piv = a(row, col);
        for (std::size_t j = 0; j <= n; ++j) a(row, j) /= piv;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == row || a(i, col).is_zero()) continue;
            Rat f = a(i, col);
            for (std::size_t j = 0; j <= n; ++j) a(i, j) -= f * a(row, j);
        }
        ++row;
    }
    std::vector<Int> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rat r = a(i, n);
        if (!(r.den() == Int(1))) throw std::runtime_error("solve_unimodular: non-integral solution");
        x[i] = r.num();
    }
    return x;
}

H1Class H1Data::raw_class_of_kernel_vector(const std::vector<Int>& u) const {
    // u in kernel coordinates; class coordinates via the relation SNF:
    // w = U * u ; free coords where the diagonal is zero, torsion where d > 1.
    const Mat<Int>& U = h1_snf.left;
    std::vector<Int> w(kernel_dim, Int(0));
    for (std::size_t i = 0; i < kernel_dim; ++i)
        for (std::size_t j = 0; j < kernel_dim; ++j) w[i] += U(i, j) * u[j];
    H1Class cls = H1Class::zero(free_rank, tor_orders.size());
    std::size_t fi = 0, ti = 0;
    std::size_t ncols = h1_snf.d.cols();
    for (std::size_t i = 0; i < kernel_dim; ++i) {
        Int d = (i < ncols && i < h1_snf.d.rows()) ? h1_snf.d(i, i) : Int(0);
        if (d.is_zero()) {
            cls.free[fi] = w[i] * Int(free_signs.empty() ? 1 : free_signs[fi]);
            fi++;
        } else if (!d.is_one()) {
            cls.tor[ti] = mod_pos(w[i], d);
            ti++;
        }
    }
    return cls;
}

H1Class H1Data::class_of_cycle(const std::map<int, long>& edge_coeffs) const {
    std::vector<Int> y(one_cells.size(), Int(0));
    for (const auto& [id, c] : edge_coeffs) {
        auto it = one_cell_pos.find(id);
        if (it == one_cell_pos.end()) throw std::invalid_argument("class_of_cycle: unknown 1-cell");
        y[it->second] = Int(c);
    }
    // Solve kernel_basis * u = y. kernel_basis is E x m with full column rank;
    // extend to a square solve by selecting m independent rows (precomputed at
    // build time as the pivot rows of the kernel basis).
    // For simplicity solve the least structured way: augment and eliminate.
    const std::size_t E = kernel_basis.rows(), m = kernel_dim;
    Mat<Rat> a(E, m + 1);
    for (std::size_t i = 0; i < E; ++i) {
        for (std::size_t j = 0; j < m; ++j) a(i, j) = Rat(kernel_basis(i, j));
        a(i, m) = Rat(y[i]);
    }
    std::vector<Int> u(m, Int(0));
    std::size_t row = 0;
    std::vector<std::size_t> pivot_col_of_row;
    for (std::size_t col = 0; col < m && row < E; ++col) {
        std::size_t p = row;
        while (p < E && a(p, col).is_zero()) ++p;
        if (p == E) throw std::runtime_error("kernel basis not full rank");
        if (p != row)
            for (std::size_t j = 0; j <= m; ++j) std::swap(a(row, j), a(p, j));
        Rat piv = a(row, col);
        for (std::size_t j = 0; j <= m; ++j) a(row, j) /= piv;
        for (std::size_t i = 0; i < E; ++i) {
            if (i == row || a(i, col).is_zero()) continue;
            Rat f = a(i, col);
            for (std::size_t j = 0; j <= m; ++j) a(i, j) -= f * a(row, j);
        }
        pivot_col_of_row.push_back(col);
        ++row;
    }
    // Consistency: all remaining rows of the augmented column must vanish.
    for (std::size_t i = row; i < E; ++i)
        if (!a(i, m).is_zero()) throw std::runtime_error("class_of_cycle: vector is not a cycle");
    for (std::size_t r2 = 0; r2 < row; ++r2) {
        Rat val = a(r2, m);
        if (!(val.den() == Int(1))) throw std::runtime_error("class_of_cycle: non-integral coordinates");
        u[pivot_col_of_row[r2]] = val.num();
    }
    return raw_class_of_kernel_vector(u);
}

H1Class H1Data::label_of_walk(const Walk& w) const {
    H1Class acc = zero();
    for (const WalkStep& s : w) {
        auto it = edge_label.find(s.one_cell);
        if (it == edge_label.end()) throw std::invalid_argument("label_of_walk: unknown 1-cell");
        acc = s.dir > 0 ? add(acc, it->second) : sub(acc, it->second);
    }
    return acc;
}

H1Data compute_h1(const AttachedComplex& cx) {
    H1Data h;
    // Boundary matrices of the absolute complex.
    std::vector<int> zero_cells;
    for (const Cell& c : cx.cells) {
        if (c.dim == 0) zero_cells.push_back(c.id);
        if (c.dim == 1) {
            h.one_cell_pos[c.id] = h.one_cells.size();
            h.one_cells.push_back(c.id);
        }
    }
    std::map<int, std::size_t> v_pos;
    for (std::size_t i = 0; i < zero_cells.size(); ++i) v_pos[zero_cells[i]] = i;

    Mat<Int> d1(zero_cells.size(), h.one_cells.size());
    for (std::size_t j = 0; j < h.one_cells.size(); ++j) {
        const Cell& c = cx.cells[static_cast<std::size_t>(h.one_cells[j])];
        for (const Incidence& inc : c.boundary) d1(v_pos.at(inc.face), j) += Int(inc.sign);
    }
    std::vector<int> two_cells;
    for (const Cell& c : cx.cells)
        if (c.dim == 2) two_cells.push_back(c.id);
    Mat<Int> d2(h.one_cells.size(), two_cells.size());
    for (std::size_t j = 0; j < two_cells.size(); ++j) {
        const Cell& c = cx.cells[static_cast<std::size_t>(two_cells[j])];
        for (const Incidence& inc : c.boundary) d2(h.one_cell_pos.at(inc.face), j) += Int(inc.sign);
    }

    // Kernel of d1.
    SmithForm s1 = smith_normal_form(d1);
    const std::size_t E = h.one_cells.size();
    h.kernel_dim = E - s1.rank;
    h.kernel_basis = Mat<Int>(E, h.kernel_dim);
    for (std::size_t j = 0; j < h.kernel_dim; ++j)
        for (std::size_t i = 0; i < E; ++i) h.kernel_basis(i, j) = s1.right(i, s1.rank + j);

    // Relations: express the columns of d2 in kernel coordinates.
    Mat<Int> rel(h.kernel_dim, two_cells.size());
    for (std::size_t j = 0; j < two_cells.size(); ++j) {
        std::vector<Int> y(E);
        for (std::size_t i = 0; i < E; ++i) y[i] = d2(i, j);
        // Solve kernel_basis u = y via the unimodular transform: y = V z, take
        // the kernel block of z.
        std::vector<Int> z = solve_unimodular(s1.right, y);
        for (std::size_t i = 0; i < s1.rank; ++i)
            if (!z[i].is_zero()) throw std::logic_error("boundary 2-chain is not a cycle");
        for (std::size_t i = 0; i < h.kernel_dim; ++i) rel(i, j) = z[s1.rank + i];
    }
    h.h1_snf = smith_normal_form(rel);
    std::size_t ncols = h.h1_snf.d.cols();
    for (std::size_t i = 0; i < h.kernel_dim; ++i) {
        Int d = (i < ncols && i < h.h1_snf.d.rows()) ? h.h1_snf.d(i, i) : Int(0);
        if (d.is_zero()) h.free_rank++;
        else if (!d.is_one()) h.tor_orders.push_back(d);
    }
    h.free_signs.assign(h.free_rank, 1);

    // Spanning tree from x0 (BFS, tie-break by cell id) and edge labels.
    std::map<int, std::vector<std::pair<int, int>>> adj;  // 0-cell -> (0-cell, 1-cell id)
    for (int id : h.one_cells) {
        const Cell& c = cx.cells[static_cast<std::size_t>(id)];
        adj[c.ends[0]].push_back({c.ends[1], id});
        adj[c.ends[1]].push_back({c.ends[0], id});
    }
    for (auto& [n, v] : adj) std::sort(v.begin(), v.end());
    std::map<int, std::pair<int, int>> parent;  // node -> (parent node, via 1-cell)
    std::set<int> intree;
    std::queue<int> q;
    q.push(cx.x0);
    intree.insert(cx.x0);
    std::set<int> tree_set;
    while (!q.empty()) {
        int n = q.front();
        q.pop();
        for (const auto& [m, eid] : adj[n])
            if (!intree.count(m)) {
                intree.insert(m);
                parent[m] = {n, eid};
                tree_set.insert(eid);
                q.push(m);
            }
    }
    for (int id : zero_cells)
        if (!intree.count(id)) throw std::runtime_error("1-skeleton is disconnected");
    h.tree_edges.assign(tree_set.begin(), tree_set.end());

    // Tree path from x0 to a node, as signed 1-cell coefficients.
    auto tree_path_coeffs = [&](int node) {
        std::map<int, long> coeffs;
        while (node != cx.x0) {
            auto [p, eid] = parent.at(node);
            const Cell& e = cx.cells[static_cast<std::size_t>(eid)];
            coeffs[eid] += (e.ends[1] == node) ? 1 : -1;
            node = p;
        }
        return coeffs;
    };
    for (int id : h.one_cells) {
        if (tree_set.count(id)) {
            h.edge_label[id] = h.zero();
            continue;
        }
        const Cell& c = cx.cells[static_cast<std::size_t>(id)];
        // Fundamental cycle: tree path to tail, the edge, tree path back.
        std::map<int, long> cyc = tree_path_coeffs(c.ends[0]);
        cyc[id] += 1;
        for (const auto& [eid, k] : tree_path_coeffs(c.ends[1])) cyc[eid] -= k;
        h.edge_label[id] = h.class_of_cycle(cyc);
    }
    return h;
}

H1Class chain_difference(const AttachedComplex& cx, const H1Data& h1, const EulerChain& z1,
                         const EulerChain& z2) {
    if (z1.kind != z2.kind) throw std::invalid_argument("chain_difference: kind mismatch");
    std::map<int, long> cyc;
    auto add_leg = [&](const ChainLeg& l, int s) {
        for (const WalkStep& st : l.walk) cyc[st.one_cell] += s * st.dir * l.coeff;
    };
    for (const ChainLeg& l : z1.legs) add_leg(l, +1);
    for (const ChainLeg& l : z2.legs) add_leg(l, -1);
    (void)cx;
    return h1.class_of_cycle(cyc);
}

} // namespace spinetor
