#include "spinetor/laurent.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace spinetor {

ExpVec exp_zero(std::size_t k) { return ExpVec(k, 0); }

ExpVec exp_add(const ExpVec& a, const ExpVec& b) {
    ExpVec c(a);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += b[i];
    return c;
}

ExpVec exp_sub(const ExpVec& a, const ExpVec& b) {
    ExpVec c(a);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] -= b[i];
    return c;
}

bool exp_lex_less(const ExpVec& a, const ExpVec& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

Poly Poly::constant(std::size_t nvars, const Int& c) {
    Poly p(nvars);
    p.add_term(exp_zero(nvars), c);
    return p;
}

Poly Poly::monomial(std::size_t nvars, const ExpVec& e, const Int& c) {
    Poly p(nvars);
    p.add_term(e, c);
    return p;
}

void Poly::add_term(const ExpVec& e, const Int& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        terms_.emplace(e, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

Poly Poly::operator-() const {
    Poly p(nvars_);
    for (const auto& [e, c] : terms_) p.terms_.emplace(e, -c);
    return p;
}

Poly operator+(const Poly& a, const Poly& b) {
    Poly p(a);
    for (const auto& [e, c] : b.terms_) p.add_term(e, c);
    return p;
}

Poly operator-(const Poly& a, const Poly& b) {
    Poly p(a);
    for (const auto& [e, c] : b.terms_) p.add_term(e, -c);
    return p;
}

Poly operator*(const Poly& a, const Poly& b) {
    Poly p(a.nvars_);
    for (const auto& [ea, ca] : a.terms_)
        for (const auto& [eb, cb] : b.terms_) p.add_term(exp_add(ea, eb), ca * cb);
    return p;
}

const std::pair<const ExpVec, Int>& Poly::lead() const {
    if (terms_.empty()) throw std::logic_error("lead of zero polynomial");
    return *terms_.rbegin();
}

Poly Poly::divexact(const Poly& a, const Poly& b) {
    if (b.is_zero()) throw std::invalid_argument("polynomial division by zero");
    Poly rem(a), quo(a.nvars_);
    while (!rem.is_zero()) {
        const auto& lr = rem.lead();
        const auto& lb = b.lead();
        ExpVec de = exp_sub(lr.first, lb.first);
        Int qc = Int::divexact(lr.second, lb.second);
        Poly t = Poly::monomial(a.nvars_, de, qc);
        quo = quo + t;
        rem = rem - t * b;
        if (!rem.is_zero() && exp_lex_less(lr.first, rem.lead().first))
            throw std::logic_error("divexact: not an exact polynomial division");
    }
    return quo;
}

Int Poly::content() const {
    Int g(0);
    for (const auto& [e, c] : terms_) g = Int::gcd(g, c);
    return g;
}

ExpVec Poly::min_exponents() const {
    if (terms_.empty()) return exp_zero(nvars_);
    ExpVec m = terms_.begin()->first;
    for (const auto& [e, c] : terms_)
        for (std::size_t i = 0; i < nvars_; ++i) m[i] = std::min(m[i], e[i]);
    return m;
}

Poly Poly::shifted(const ExpVec& delta) const {
    Poly p(nvars_);
    for (const auto& [e, c] : terms_) p.terms_.emplace(exp_add(e, delta), c);
    return p;
}

Int Poly::eval_all_ones() const {
    Int s(0);
    for (const auto& [e, c] : terms_) s += c;
    return s;
}

std::string Poly::str(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    // Lex-descending for readability: highest power first.
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const ExpVec& e = it->first;
        const Int& c = it->second;
        bool neg = c.sign() < 0;
        Int ac = c.abs();
        if (first) {
            if (neg) os << "-";
            first = false;
        } else {
            os << (neg ? " - " : " + ");
        }
        bool any_var = false;
        std::ostringstream vars;
        for (std::size_t i = 0; i < nvars_; ++i) {
            if (e[i] == 0) continue;
            if (any_var) vars << "*";
            vars << names[i];
            if (e[i] != 1) vars << "^" << e[i];
            any_var = true;
        }
        if (!any_var) {
            os << ac.str();
        } else {
            if (!ac.is_one()) os << ac.str() << "*";
            os << vars.str();
        }
    }
    return os.str();
}

Poly poly_gcd_univariate(const Poly& a, const Poly& b) {
    if (a.nvars() != 1 || b.nvars() != 1) throw std::invalid_argument("univariate gcd");
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    auto primitive = [](const Poly& p) {
        Int c = p.content();
        return Poly::divexact(p, Poly::constant(1, c));
    };
    auto deg = [](const Poly& p) { return p.lead().first[0]; };
    Poly f = primitive(a), g = primitive(b);
    if (deg(f) < deg(g)) std::swap(f, g);
    while (!g.is_zero()) {
        // Pseudo-remainder of f by g.
        Poly r = f;
        while (!r.is_zero() && deg(r) >= deg(g)) {
            Int lr = r.lead().second, lg = g.lead().second;
            Int m = Int::divexact(lr * lg, Int::gcd(lr, lg));  // lcm
            Poly scaled = r * Poly::constant(1, Int::divexact(m, lr));
            ExpVec sh{static_cast<std::int32_t>(deg(r) - deg(g))};
            scaled = scaled - g * Poly::monomial(1, sh, Int::divexact(m, lg));
            r = scaled;
        }
        f = g;
        g = r.is_zero() ? r : primitive(r);
    }
    Poly res = primitive(f);
    if (res.lead().second.sign() < 0) res = -res;
    return res;
}

Int gcd_contents(const Poly& a, const Poly& b) {
    return Int::gcd(a.content(), b.content());
}

LaurentRational::LaurentRational(std::size_t nvars)
    : nvars_(nvars), num_(Poly::constant(nvars, Int(0))), den_(Poly::constant(nvars, Int(1))), mono_(exp_zero(nvars)) {}

LaurentRational LaurentRational::from_int(std::size_t nvars, const Int& c) {
    LaurentRational r(nvars);
    r.num_ = Poly::constant(nvars, c);
    r.normalize();
    return r;
}

LaurentRational LaurentRational::monomial(std::size_t nvars, const ExpVec& e, const Int& c) {
    LaurentRational r(nvars);
    r.num_ = Poly::constant(nvars, c);
    r.mono_ = e;
    r.normalize();
    return r;
}

LaurentRational LaurentRational::from_poly(const Poly& p) {
    LaurentRational r(p.nvars());
    r.num_ = p;
    r.mono_ = exp_zero(p.nvars());
    r.normalize();
    return r;
}

LaurentRational LaurentRational::fraction(const Poly& num, const Poly& den) {
    if (den.is_zero()) throw std::invalid_argument("zero denominator");
    LaurentRational r(num.nvars());
    r.num_ = num;
    r.den_ = den;
    r.mono_ = exp_zero(num.nvars());
    r.normalize();
    return r;
}

bool LaurentRational::is_one() const {
    LaurentRational one = from_int(nvars_, Int(1));
    return *this == one;
}

void LaurentRational::normalize() {
    if (num_.is_zero()) {
        den_ = Poly::constant(nvars_, Int(1));
        mono_ = exp_zero(nvars_);
        return;
    }
    // Pull monomial factors out of num and den into mono_.
    ExpVec mn = num_.min_exponents();
    ExpVec negmn = mn;
    for (auto& x : negmn) x = -x;
    num_ = num_.shifted(negmn);
    mono_ = exp_add(mono_, mn);
    ExpVec md = den_.min_exponents();
    ExpVec negmd = md;
    for (auto& x : negmd) x = -x;
    den_ = den_.shifted(negmd);
    mono_ = exp_sub(mono_, md);

    // Coprime contents.
    Int g = Int::gcd(num_.content(), den_.content());
    if (!g.is_one()) {
        Poly gg = Poly::constant(nvars_, g);
        num_ = Poly::divexact(num_, gg);
        den_ = Poly::divexact(den_, gg);
    }
    // Full reduction in the univariate case.
    if (nvars_ == 1) {
        Poly g1 = poly_gcd_univariate(num_, den_);
        if (!(g1.is_monomial() && g1.lead().second.is_one() && g1.lead().first[0] == 0)) {
            num_ = Poly::divexact(num_, g1);
            den_ = Poly::divexact(den_, g1);
        }
    } else if (num_ == den_) {
        num_ = Poly::constant(nvars_, Int(1));
        den_ = Poly::constant(nvars_, Int(1));
    }
    // Denominator lex-leading coefficient positive.
    if (den_.lead().second.sign() < 0) {
        num_ = -num_;
        den_ = -den_;
    }
}

LaurentRational LaurentRational::operator-() const {
    LaurentRational r(*this);
    r.num_ = -r.num_;
    return r;
}

LaurentRational LaurentRational::promoted(std::size_t nvars) const {
    if (nvars_ == nvars) return *this;
    if (nvars_ != 0 || nvars < nvars_) throw std::invalid_argument("cannot promote variable count");
    LaurentRational r(nvars);
    Poly n(nvars), d(nvars);
    for (const auto& [e, c] : num_.terms()) n.add_term(exp_zero(nvars), c);
    for (const auto& [e, c] : den_.terms()) d.add_term(exp_zero(nvars), c);
    if (d.is_zero()) d = Poly::constant(nvars, Int(1));
    r.num_ = n;
    r.den_ = d;
    r.mono_ = exp_zero(nvars);
    r.normalize();
    return r;
}

LaurentRational operator+(const LaurentRational& a0, const LaurentRational& b0) {
    if (a0.is_zero()) return b0;
    if (b0.is_zero()) return a0;
    std::size_t k0 = std::max(a0.nvars_, b0.nvars_);
    LaurentRational a = a0.promoted(k0), b = b0.promoted(k0);
    const std::size_t k = a.nvars_;
    // Common monomial prefix: componentwise min.
    ExpVec m(k);
    for (std::size_t i = 0; i < k; ++i) m[i] = std::min(a.mono_[i], b.mono_[i]);
    LaurentRational r(k);
    r.num_ = a.num_.shifted(exp_sub(a.mono_, m)) * b.den_ + b.num_.shifted(exp_sub(b.mono_, m)) * a.den_;
    r.den_ = a.den_ * b.den_;
    r.mono_ = m;
    r.normalize();
    return r;
}

LaurentRational operator-(const LaurentRational& a, const LaurentRational& b) { return a + (-b); }

LaurentRational operator*(const LaurentRational& a0, const LaurentRational& b0) {
    if (a0.is_zero() || b0.is_zero()) return LaurentRational(std::max(a0.nvars_, b0.nvars_));
    std::size_t k0 = std::max(a0.nvars_, b0.nvars_);
    LaurentRational a = a0.promoted(k0), b = b0.promoted(k0);
    LaurentRational r(a.nvars_);
    r.num_ = a.num_ * b.num_;
    r.den_ = a.den_ * b.den_;
    r.mono_ = exp_add(a.mono_, b.mono_);
    r.normalize();
    return r;
}

LaurentRational operator/(const LaurentRational& a, const LaurentRational& b) {
    return a * b.inverse();
}

LaurentRational LaurentRational::inverse() const {
    if (is_zero()) throw std::invalid_argument("inverse of zero");
    LaurentRational r(nvars_);
    r.num_ = den_;
    r.den_ = num_;
    r.mono_ = mono_;
    for (auto& x : r.mono_) x = -x;
    r.normalize();
    return r;
}

bool operator==(const LaurentRational& a0, const LaurentRational& b0) {
    if (a0.is_zero() || b0.is_zero()) return a0.is_zero() == b0.is_zero();
    std::size_t k0 = std::max(a0.nvars_, b0.nvars_);
    LaurentRational a = a0.promoted(k0), b = b0.promoted(k0);
    // t^ma * na/da == t^mb * nb/db  <=>  t^(ma-mb) * na*db == nb*da
    Poly lhs = a.num_ * b.den_;
    Poly rhs = b.num_ * a.den_;
    lhs = lhs.shifted(exp_sub(a.mono_, b.mono_));
    return lhs == rhs;
}

bool LaurentRational::equals_up_to_sign(const LaurentRational& o) const {
    return *this == o || *this == -o;
}

Rat LaurentRational::eval_all_ones() const {
    Int n = num_.eval_all_ones();
    Int d = den_.eval_all_ones();
    if (d.is_zero()) throw std::domain_error("denominator vanishes at t=1");
    return Rat(n, d);
}

std::vector<std::string> LaurentRational::default_names(std::size_t k) {
    std::vector<std::string> names;
    if (k == 1) {
        names.push_back("t");
    } else {
        for (std::size_t i = 0; i < k; ++i) names.push_back("t" + std::to_string(i + 1));
    }
    return names;
}

std::string LaurentRational::str(const std::vector<std::string>& names) const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool mono_trivial = (mono_ == exp_zero(nvars_));
    std::string ns = num_.str(names);
    std::string ds = den_.str(names);
    bool den_trivial = (den_.is_monomial() && den_.lead().second.is_one() &&
                        den_.lead().first == exp_zero(nvars_));
    if (!mono_trivial) {
        std::ostringstream ms;
        bool any = false;
        for (std::size_t i = 0; i < nvars_; ++i) {
            if (mono_[i] == 0) continue;
            if (any) ms << "*";
            ms << names[i];
            if (mono_[i] != 1) ms << "^" << mono_[i];
            any = true;
        }
        // Monomial times the rest.
        if (num_.is_monomial() && den_trivial) {
            const Int& c = num_.lead().second;
            if (c.is_one()) return ms.str();
            if ((-c).is_one()) return "-" + ms.str();
            return c.str() + "*" + ms.str();
        }
        os << ms.str() << " * ";
    }
    bool num_simple = num_.term_count() <= 1;
    if (den_trivial) {
        if (!mono_trivial && !num_simple) os << "(" << ns << ")";
        else os << ns;
    } else {
        os << (num_simple ? ns : "(" + ns + ")");
        os << "/";
        os << (den_.term_count() <= 1 ? ds : "(" + ds + ")");
    }
    return os.str();
}

std::string LaurentRational::str() const { return str(default_names(nvars_)); }

TorsionValue TorsionValue::of(const LaurentRational& v) {
    TorsionValue t;
    t.defined = true;
    // Sign normalization: numerator's lex-leading coefficient positive.
    if (!v.is_zero() && v.num().lead().second.sign() < 0)
        t.value = -v;
    else
        t.value = v;
    return t;
}

bool TorsionValue::same(const TorsionValue& o) const {
    if (!defined || !o.defined) return defined == o.defined;
    return value.equals_up_to_sign(o.value);
}

std::string TorsionValue::str() const {
    if (!defined) return "undefined";
    return "+- " + value.str();
}

} // namespace spinetor
