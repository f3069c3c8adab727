#include "spinetor/twisted.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>
#include <sstream>

namespace spinetor {

Representation Representation::standard(const H1Data& h1) {
    Representation r;
    r.k = h1.free_rank;
    for (std::size_t i = 0; i < r.k; ++i) {
        ExpVec e = exp_zero(r.k);
        e[i] = 1;
        r.free_images.push_back(LaurentRational::monomial(r.k, e));
    }
    r.torsion_images.assign(h1.tor_orders.size(), 1);
    return r;
}

Representation Representation::with_assignments(const H1Data& h1,
                                                const std::map<std::string, std::string>& assignments) {
    Representation r = standard(h1);
    auto names = LaurentRational::default_names(r.k);
    auto parse_value = [&](const std::string& v) -> LaurentRational {
        // Accepts 1, -1, tj, tj^e, -tj^e.
        std::string s = v;
        bool neg = false;
        if (!s.empty() && s[0] == '-') {
            neg = true;
            s = s.substr(1);
        }
        LaurentRational out;
        if (s == "1") {
            out = LaurentRational::from_int(r.k, Int(1));
        } else {
            std::string base = s;
            int expn = 1;
            auto caret = s.find('^');
            if (caret != std::string::npos) {
                base = s.substr(0, caret);
                expn = std::stoi(s.substr(caret + 1));
            }
            int var = -1;
            for (std::size_t i = 0; i < names.size(); ++i)
                if (names[i] == base) var = static_cast<int>(i);
            if (var < 0) throw std::invalid_argument("unknown unit in representation: " + v);
            ExpVec e = exp_zero(r.k);
            e[static_cast<std::size_t>(var)] = expn;
            out = LaurentRational::monomial(r.k, e);
        }
        return neg ? -out : out;
    };
    for (const auto& [name, value] : assignments) {
        bool found = false;
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) {
                r.free_images[i] = parse_value(value);
                found = true;
            }
        if (!found && name.size() > 1 && name[0] == 'g') {
            std::size_t idx = static_cast<std::size_t>(std::stoul(name.substr(1))) - 1;
            if (idx >= r.torsion_images.size()) throw std::invalid_argument("unknown torsion generator " + name);
            if (value == "1") r.torsion_images[idx] = 1;
            else if (value == "-1") r.torsion_images[idx] = -1;
            else throw std::invalid_argument("torsion generators accept only 1 or -1");
            // Order check: (-1)^order must be 1.
            if (r.torsion_images[idx] == -1) {
                Int ord = h1.tor_orders[idx];
                Int two = Int(2);
                Int q = Int::fdiv_q(ord, two);
                if (!(ord - q * two).is_zero())
                    throw std::invalid_argument("torsion generator of odd order cannot map to -1");
            }
            found = true;
        }
        if (!found) throw std::invalid_argument("unknown generator name: " + name);
    }
    return r;
}

LaurentRational Representation::apply(const H1Class& cls) const {
    LaurentRational out = LaurentRational::from_int(k, Int(1));
    for (std::size_t i = 0; i < cls.free.size(); ++i) {
        const Int& e = cls.free[i];
        if (e.is_zero()) continue;
        if (!e.fits_long()) throw std::runtime_error("exponent overflow in representation");
        long n = e.to_long();
        LaurentRational p = free_images[i];
        if (n < 0) {
            p = p.inverse();
            n = -n;
        }
        for (long j = 0; j < n; ++j) out = out * p;
    }
    int sgn = 1;
    for (std::size_t i = 0; i < cls.tor.size(); ++i) {
        if (torsion_images[i] == -1) {
            Int m = cls.tor[i];
            Int two = Int(2);
            Int q = Int::fdiv_q(m, two);
            if (!(m - q * two).is_zero()) sgn = -sgn;
        }
    }
    return sgn > 0 ? out : -out;
}

bool Representation::trivial_on_free() const {
    for (const auto& im : free_images)
        if (!im.is_one()) return false;
    return true;
}

std::map<int, H1Class> preferred_lifts(const AttachedComplex& cx, const H1Data& h1, const EulerChain& z) {
    std::map<int, H1Class> lifts;
    for (const auto& sp : z.spiders(cx))
        for (const auto& [cell, walk] : sp.walk_from_head) lifts[cell] = h1.label_of_walk(walk);
    return lifts;
}

TwistedComplex twisted_complex(const AttachedComplex& cx, const H1Data& h1,
                               const std::map<int, H1Class>& lifts, const Representation& rep,
                               RelMode rel) {
    TwistedComplex tc;
    tc.nvars = rep.k;
    tc.rel = rel;
    auto keep = [&](const Cell& c) {
        if (c.label == PatternLabel::White) return false;
        if (rel == RelMode::WBar && c.label == PatternLabel::Concave) return false;
        return true;
    };
    std::array<std::map<int, std::size_t>, 4> pos;
    for (const Cell& c : cx.cells) {
        if (!keep(c)) continue;
        pos[static_cast<std::size_t>(c.dim)][c.id] = tc.basis_cells[static_cast<std::size_t>(c.dim)].size();
        tc.basis_cells[static_cast<std::size_t>(c.dim)].push_back(c.id);
    }
    auto lift_of = [&](int cell) -> const H1Class& {
        auto it = lifts.find(cell);
        if (it == lifts.end()) throw std::runtime_error("cell outside the chain's coverage: " + std::to_string(cell));
        return it->second;
    };
    for (int dim = 1; dim <= 3; ++dim) {
        const auto& cols = tc.basis_cells[static_cast<std::size_t>(dim)];
        const auto& rows = tc.basis_cells[static_cast<std::size_t>(dim - 1)];
        Mat<LaurentRational> m(rows.size(), cols.size());
        for (std::size_t j = 0; j < cols.size(); ++j) {
            const Cell& c = cx.cells[static_cast<std::size_t>(cols[j])];
            const H1Class& gc = lift_of(c.id);
            for (const Incidence& inc : c.boundary) {
                auto it = pos[static_cast<std::size_t>(dim - 1)].find(inc.face);
                if (it == pos[static_cast<std::size_t>(dim - 1)].end()) continue;
                const H1Class& gf = lift_of(inc.face);
                H1Class deck = h1.sub(h1.add(gc, h1.label_of_walk(inc.walk)), gf);
                LaurentRational coeff = rep.apply(deck);
                if (inc.sign < 0) coeff = -coeff;
                m(it->second, j) += coeff;
            }
        }
        tc.d[static_cast<std::size_t>(dim)] = std::move(m);
    }
    return tc;
}

bool TwistedComplex::boundary_squared_zero() const {
    for (int dim = 2; dim <= 3; ++dim) {
        const auto& a = d[static_cast<std::size_t>(dim)];
        const auto& b = d[static_cast<std::size_t>(dim - 1)];
        if (b.rows() == 0 || a.cols() == 0) continue;
        Mat<LaurentRational> p = b * a;
        for (std::size_t i = 0; i < p.rows(); ++i)
            for (std::size_t j = 0; j < p.cols(); ++j)
                if (!p(i, j).is_zero()) return false;
    }
    return true;
}

namespace {

// Clears denominators and monomials row by row; returns the Laurent-polynomial
// matrix together with the accumulated correction factor so that
// det(original) = det(cleared) / correction.
struct Cleared {
    Mat<Poly> m;
    LaurentRational correction;  // multiply dets of cleared by 1/correction
};

Cleared clear_matrix(const Mat<LaurentRational>& a, std::size_t nvars) {
    Cleared out;
    out.m = Mat<Poly>(a.rows(), a.cols());
    out.correction = LaurentRational::from_int(nvars, Int(1));
    for (std::size_t i = 0; i < a.rows(); ++i) {
        Poly row_prod = Poly::constant(nvars, Int(1));
        std::vector<Poly> dens(a.cols(), Poly::constant(nvars, Int(1)));
        for (std::size_t j = 0; j < a.cols(); ++j) {
            LaurentRational x = a(i, j).promoted(nvars);
            if (x.is_zero()) continue;
            dens[j] = x.den();
            row_prod = row_prod * dens[j];
        }
        out.correction = out.correction * LaurentRational::from_poly(row_prod);
        for (std::size_t j = 0; j < a.cols(); ++j) {
            LaurentRational x = a(i, j).promoted(nvars);
            if (x.is_zero()) {
                out.m(i, j) = Poly(nvars);
                continue;
            }
            Poly others = Poly::divexact(row_prod, dens[j]);
            out.m(i, j) = (x.num() * others).shifted(x.mono());
        }
    }
    return out;
}

// Fraction-free (Bareiss) elimination over Laurent polynomials. Returns rank,
// det (when square and nonsingular) and records chosen pivot rows.
struct Elim {
    std::size_t rank = 0;
    Poly det;  // valid when rank == n == m
    std::vector<std::size_t> pivot_rows;
};

Elim bareiss(Mat<Poly> m, std::size_t nvars, const std::vector<std::size_t>* row_pref = nullptr) {
    Elim out;
    out.det = Poly::constant(nvars, Int(1));
    const std::size_t R = m.rows(), C = m.cols();
    std::vector<std::size_t> rows(R);
    for (std::size_t i = 0; i < R; ++i) rows[i] = i;
    if (row_pref) {
        std::vector<std::size_t> order(*row_pref);
        for (std::size_t i = 0; i < R; ++i)
            if (std::find(order.begin(), order.end(), i) == order.end()) order.push_back(i);
        rows = order;
    }
    Poly prev = Poly::constant(nvars, Int(1));
    int sign = 1;
    std::size_t r = 0;
    for (std::size_t col = 0; col < C && r < R; ++col) {
        // Pivot: with an explicit row preference take the first nonzero in
        // that order, otherwise favour sparse pivots.
        std::size_t best = R;
        std::size_t best_terms = 0;
        for (std::size_t k = r; k < R; ++k) {
            const Poly& x = m(rows[k], col);
            if (x.is_zero()) continue;
            if (row_pref) {
                best = k;
                break;
            }
            std::size_t terms = x.term_count();
            if (best == R || terms < best_terms) {
                best = k;
                best_terms = terms;
            }
        }
        if (best == R) continue;
        if (best != r) {
            std::swap(rows[best], rows[r]);
            sign = -sign;
        }
        const Poly piv = m(rows[r], col);
        for (std::size_t i = r + 1; i < R; ++i) {
            for (std::size_t j = col + 1; j < C; ++j) {
                Poly num = m(rows[i], j) * piv - m(rows[i], col) * m(rows[r], j);
                m(rows[i], j) = num.is_zero() ? Poly(nvars) : Poly::divexact(num, prev);
            }
            m(rows[i], col) = Poly(nvars);
        }
        prev = piv;
        out.pivot_rows.push_back(rows[r]);
        ++r;
    }
    out.rank = r;
    if (r == R && R == C) {
        out.det = sign > 0 ? prev : -prev;
    }
    return out;
}

} // namespace

std::size_t rank_laurent(const Mat<LaurentRational>& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    std::size_t nvars = 0;
    for (std::size_t i = 0; i < m.rows() && nvars == 0; ++i)
        for (std::size_t j = 0; j < m.cols() && nvars == 0; ++j) nvars = m(i, j).nvars();
    Cleared c = clear_matrix(m, nvars);
    return bareiss(c.m, nvars).rank;
}

LaurentRational det_laurent(Mat<LaurentRational> m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("det of non-square matrix");
    if (m.rows() == 0) return LaurentRational::from_int(0, Int(1));
    std::size_t nvars = 0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) nvars = std::max(nvars, m(i, j).nvars());
    Cleared c = clear_matrix(m, nvars);
    Elim e = bareiss(c.m, nvars);
    if (e.rank < m.rows()) return LaurentRational(nvars);  // zero
    return LaurentRational::from_poly(e.det) / c.correction;
}

bool is_acyclic(const TwistedComplex& tc) {
    std::array<std::size_t, 4> n{};
    for (int i = 0; i < 4; ++i) n[static_cast<std::size_t>(i)] = tc.basis_cells[static_cast<std::size_t>(i)].size();
    std::array<std::size_t, 5> r{};
    for (int i = 1; i <= 3; ++i) r[static_cast<std::size_t>(i)] = rank_laurent(tc.d[static_cast<std::size_t>(i)]);
    r[0] = 0;
    r[4] = 0;
    for (int i = 0; i <= 3; ++i)
        if (n[static_cast<std::size_t>(i)] != r[static_cast<std::size_t>(i)] + r[static_cast<std::size_t>(i + 1)])
            return false;
    return true;
}

TorsionValue torsion(const TwistedComplex& tc, const std::vector<std::vector<std::size_t>>* subset_preference) {
    if (!is_acyclic(tc)) return TorsionValue::undefined();
    std::size_t nvars = tc.nvars;
    std::array<std::size_t, 5> r{};
    for (int i = 1; i <= 3; ++i) r[static_cast<std::size_t>(i)] = rank_laurent(tc.d[static_cast<std::size_t>(i)]);

    // S_3 = all of C_3; then S_i = complement of the chosen pivot-row set of
    // d_{i+1}[*, S_{i+1}], which is exactly the rows of a nonsingular minor.
    std::array<std::vector<std::size_t>, 4> S;
    for (std::size_t j = 0; j < tc.basis_cells[3].size(); ++j) S[3].push_back(j);

    LaurentRational tau = LaurentRational::from_int(nvars, Int(1));
    for (int i = 2; i >= 0; --i) {
        const Mat<LaurentRational>& d = tc.d[static_cast<std::size_t>(i + 1)];
        const std::size_t ni = tc.basis_cells[static_cast<std::size_t>(i)].size();
        // Submatrix with columns S_{i+1}.
        Mat<LaurentRational> sub(ni, S[static_cast<std::size_t>(i + 1)].size());
        for (std::size_t a = 0; a < ni; ++a)
            for (std::size_t b = 0; b < S[static_cast<std::size_t>(i + 1)].size(); ++b)
                sub(a, b) = d(a, S[static_cast<std::size_t>(i + 1)][b]);
        // Choose independent rows.
        std::size_t need = S[static_cast<std::size_t>(i + 1)].size();
        Cleared c = clear_matrix(sub, nvars);
        std::vector<std::size_t> pref;
        if (subset_preference && subset_preference->size() > static_cast<std::size_t>(i))
            pref = (*subset_preference)[static_cast<std::size_t>(i)];
        Elim e = bareiss(c.m, nvars, pref.empty() ? nullptr : &pref);
        if (e.rank != need) return TorsionValue::undefined();
        std::vector<std::size_t> rows = e.pivot_rows;
        std::sort(rows.begin(), rows.end());
        // det of the square minor.
        Mat<LaurentRational> minor(need, need);
        for (std::size_t a = 0; a < need; ++a)
            for (std::size_t b = 0; b < need; ++b) minor(a, b) = sub(rows[a], b);
        LaurentRational detv = det_laurent(minor);
        if (detv.is_zero()) throw std::logic_error("singular minor despite acyclicity");
        if (i % 2 == 0) tau = tau * detv;
        else tau = tau / detv;
        // S_i = complement of the chosen rows.
        std::set<std::size_t> rowset(rows.begin(), rows.end());
        S[static_cast<std::size_t>(i)].clear();
        for (std::size_t a = 0; a < ni; ++a)
            if (!rowset.count(a)) S[static_cast<std::size_t>(i)].push_back(a);
    }
    if (!S[0].empty()) throw std::logic_error("leftover zero-cells in the torsion chain");
    return TorsionValue::of(tau);
}

std::string TorsionRunReport::text() const {
    std::ostringstream os;
    os << "input: " << input_digest << "\n";
    os << "free rank k: " << k << "\n";
    for (const auto& s : rep_desc) os << "rep: " << s << "\n";
    os << "acyclic: " << (acyclic ? "yes" : "no") << "\n";
    os << "torsion: " << (acyclic ? value.str() : std::string("undefined")) << "\n";
    for (const auto& s : checks) os << "check: " << s << "\n";
    return os.str();
}

std::string TorsionRunReport::json() const {
    nlohmann::ordered_json j;
    j["input"] = input_digest;
    j["k"] = k;
    j["rep"] = rep_desc;
    j["acyclic"] = acyclic;
    j["torsion"] = acyclic ? value.str() : std::string("undefined");
    j["checks"] = checks;
    return j.dump(1);
}

TorsionPipelineResult run_torsion(const AttachedComplex& cx, const Representation* rep_override, RelMode rel,
                                  bool blackened, bool blacken_orientation) {
    TorsionPipelineResult out;
    out.h1 = compute_h1(cx);
    Representation rep = rep_override ? *rep_override : Representation::standard(out.h1);
    EulerChain sp = build_s_prime(cx);
    if (blackened) {
        EulerChain ss = build_s_second(cx, sp);
        out.chain = blacken(cx, ss, blacken_orientation);
        rel = RelMode::None;
    } else {
        out.chain = sp;
    }
    auto lifts = preferred_lifts(cx, out.h1, out.chain);
    out.complex = twisted_complex(cx, out.h1, lifts, rep, rel);
    out.acyclic = is_acyclic(out.complex);
    out.value = out.acyclic ? torsion(out.complex) : TorsionValue::undefined();
    return out;
}

} // namespace spinetor
