#pragma once

#include "spinetor/exact.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace spinetor {

// Exponent vector for k Laurent variables; entries may be negative.
using ExpVec = std::vector<std::int32_t>;

ExpVec exp_zero(std::size_t k);
ExpVec exp_add(const ExpVec& a, const ExpVec& b);
ExpVec exp_sub(const ExpVec& a, const ExpVec& b);
bool exp_lex_less(const ExpVec& a, const ExpVec& b);

// Sparse multivariate polynomial over Int, monomials in lex order.
class Poly {
public:
    Poly() : nvars_(0) {}
    explicit Poly(std::size_t nvars) : nvars_(nvars) {}

    static Poly constant(std::size_t nvars, const Int& c);
    static Poly monomial(std::size_t nvars, const ExpVec& e, const Int& c);

    std::size_t nvars() const { return nvars_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }
    const std::map<ExpVec, Int>& terms() const { return terms_; }

    void add_term(const ExpVec& e, const Int& c);

    Poly operator-() const;
    friend Poly operator+(const Poly& a, const Poly& b);
    friend Poly operator-(const Poly& a, const Poly& b);
    friend Poly operator*(const Poly& a, const Poly& b);
    friend bool operator==(const Poly& a, const Poly& b) {
        return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
    }

    // Exact division; throws std::logic_error when not divisible.
    static Poly divexact(const Poly& a, const Poly& b);

    // Leading term in lex order (largest exponent vector). Poly must be nonzero.
    const std::pair<const ExpVec, Int>& lead() const;

    Int content() const;                 // gcd of coefficients, >= 0
    ExpVec min_exponents() const;        // per-variable minimum exponent
    Poly shifted(const ExpVec& delta) const;

    Int eval_all_ones() const;           // specialization t_i = 1
    bool is_monomial() const { return terms_.size() == 1; }

    std::string str(const std::vector<std::string>& names) const;

private:
    std::size_t nvars_;
    std::map<ExpVec, Int> terms_;
};

// Univariate gcd over Z (primitive PRS); inputs with nvars == 1.
Poly poly_gcd_univariate(const Poly& a, const Poly& b);

// Element of the fraction field of Laurent polynomials, kept as
// t^mono * num/den with num,den integer polynomials, den nonzero.
// Canonical: num,den have no common monomial factor and coprime contents;
// den lex-leading coefficient positive; for one variable num/den coprime.
class LaurentRational {
public:
    LaurentRational() : nvars_(0), num_(Poly(0)), den_(Poly::constant(0, Int(1))), mono_() {}
    LaurentRational(int v) : LaurentRational() {
        if (v != 0) num_ = Poly::constant(0, Int(v));
    }
    explicit LaurentRational(std::size_t nvars);
    static LaurentRational from_int(std::size_t nvars, const Int& c);
    static LaurentRational monomial(std::size_t nvars, const ExpVec& e, const Int& c = Int(1));
    static LaurentRational from_poly(const Poly& p);
    static LaurentRational fraction(const Poly& num, const Poly& den);

    std::size_t nvars() const { return nvars_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const;
    bool is_unit() const { return !is_zero(); }  // field
    bool is_monomial_times_unit_coeff() const {
        return num_.is_monomial() && den_.is_monomial();
    }

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }
    const ExpVec& mono() const { return mono_; }

    LaurentRational operator-() const;
    friend LaurentRational operator+(const LaurentRational& a, const LaurentRational& b);
    friend LaurentRational operator-(const LaurentRational& a, const LaurentRational& b);
    friend LaurentRational operator*(const LaurentRational& a, const LaurentRational& b);
    friend LaurentRational operator/(const LaurentRational& a, const LaurentRational& b);
    LaurentRational& operator+=(const LaurentRational& o) { *this = *this + o; return *this; }
    LaurentRational& operator-=(const LaurentRational& o) { *this = *this - o; return *this; }
    LaurentRational& operator*=(const LaurentRational& o) { *this = *this * o; return *this; }

    LaurentRational inverse() const;

    // Exact equality in the field (cross multiplication, no gcd needed).
    friend bool operator==(const LaurentRational& a, const LaurentRational& b);
    friend bool operator!=(const LaurentRational& a, const LaurentRational& b) { return !(a == b); }

    bool equals_up_to_sign(const LaurentRational& o) const;

    Rat eval_all_ones() const;  // t_i = 1; throws if denominator vanishes there

    // Canonical textual form, lex-descending terms.
    std::string str(const std::vector<std::string>& names) const;
    std::string str() const;  // default names t or t1..tk

    static std::vector<std::string> default_names(std::size_t k);

    // Constant values carry no variables; promote to a wider variable set.
    LaurentRational promoted(std::size_t nvars) const;

private:
    void normalize();

    std::size_t nvars_;
    Poly num_, den_;
    ExpVec mono_;
};

// Torsion values live in the units of the field modulo sign.
struct TorsionValue {
    LaurentRational value;  // representative, sign-normalized
    bool defined = true;

    static TorsionValue undefined() { TorsionValue t; t.defined = false; return t; }
    static TorsionValue of(const LaurentRational& v);

    bool same(const TorsionValue& o) const;
    std::string str() const;
};

} // namespace spinetor
