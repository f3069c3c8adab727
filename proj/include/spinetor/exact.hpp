#pragma once

#include <gmpxx.h>
#include <cstdint>
#include <iosfwd>
#include <string>

namespace spinetor {

// Value wrappers around GMP classes. gmpxx operators return expression
// templates; these wrappers pin every operation to a plain value type so the
// rest of the code (and containers of scalars) never sees an expression type.

class Int {
public:
    Int() : v_(0) {}
    Int(long x) : v_(x) {}
    Int(int x) : v_(static_cast<long>(x)) {}
    explicit Int(const mpz_class& z) : v_(z) {}
    explicit Int(const std::string& s) : v_(s) {}

    const mpz_class& raw() const { return v_; }

    bool is_zero() const { return sgn(v_) == 0; }
    bool is_one() const { return v_ == 1; }
    int sign() const { return sgn(v_); }

    Int operator-() const { return Int(mpz_class(-v_)); }
    Int& operator+=(const Int& o) { v_ += o.v_; return *this; }
    Int& operator-=(const Int& o) { v_ -= o.v_; return *this; }
    Int& operator*=(const Int& o) { v_ *= o.v_; return *this; }

    friend Int operator+(const Int& a, const Int& b) { return Int(mpz_class(a.v_ + b.v_)); }
    friend Int operator-(const Int& a, const Int& b) { return Int(mpz_class(a.v_ - b.v_)); }
    friend Int operator*(const Int& a, const Int& b) { return Int(mpz_class(a.v_ * b.v_)); }
    friend bool operator==(const Int& a, const Int& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Int& a, const Int& b) { return a.v_ != b.v_; }
    friend bool operator<(const Int& a, const Int& b) { return a.v_ < b.v_; }
    friend bool operator<=(const Int& a, const Int& b) { return a.v_ <= b.v_; }
    friend bool operator>(const Int& a, const Int& b) { return a.v_ > b.v_; }

    // Exact division; aborts if not divisible (used by Bareiss elimination).
    static Int divexact(const Int& a, const Int& b);
    static Int gcd(const Int& a, const Int& b);
    Int abs() const { return Int(mpz_class(::abs(v_))); }

    // Floor division quotient, for SNF reduction steps.
    static Int fdiv_q(const Int& a, const Int& b);

    long to_long() const { return v_.get_si(); }
    bool fits_long() const { return v_.fits_slong_p(); }
    std::string str() const { return v_.get_str(); }

private:
    mpz_class v_;
};

std::ostream& operator<<(std::ostream& os, const Int& x);

class Rat {
public:
    Rat() : v_(0) {}
    Rat(long x) : v_(x) {}
    Rat(int x) : v_(static_cast<long>(x)) {}
    Rat(const Int& n) : v_(n.raw()) {}
    Rat(const Int& n, const Int& d) : v_(n.raw(), d.raw()) { v_.canonicalize(); }
    explicit Rat(const mpq_class& q) : v_(q) { v_.canonicalize(); }

    const mpq_class& raw() const { return v_; }
    bool is_zero() const { return sgn(v_) == 0; }
    int sign() const { return sgn(v_); }

    Int num() const { return Int(mpz_class(v_.get_num())); }
    Int den() const { return Int(mpz_class(v_.get_den())); }

    Rat operator-() const { return Rat(mpq_class(-v_)); }
    Rat& operator+=(const Rat& o) { v_ += o.v_; return *this; }
    Rat& operator-=(const Rat& o) { v_ -= o.v_; return *this; }
    Rat& operator*=(const Rat& o) { v_ *= o.v_; return *this; }
    Rat& operator/=(const Rat& o) { v_ /= o.v_; return *this; }

    friend Rat operator+(const Rat& a, const Rat& b) { return Rat(mpq_class(a.v_ + b.v_)); }
    friend Rat operator-(const Rat& a, const Rat& b) { return Rat(mpq_class(a.v_ - b.v_)); }
    friend Rat operator*(const Rat& a, const Rat& b) { return Rat(mpq_class(a.v_ * b.v_)); }
    friend Rat operator/(const Rat& a, const Rat& b) { return Rat(mpq_class(a.v_ / b.v_)); }
    friend bool operator==(const Rat& a, const Rat& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rat& a, const Rat& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rat& a, const Rat& b) { return a.v_ < b.v_; }

    std::string str() const { return v_.get_str(); }

private:
    mpq_class v_;
};

std::ostream& operator<<(std::ostream& os, const Rat& x);

} // namespace spinetor
