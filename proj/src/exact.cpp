#include "spinetor/exact.hpp"

#include <ostream>
#include <stdexcept>

namespace spinetor {

Int Int::divexact(const Int& a, const Int& b) {
    if (b.is_zero()) throw std::invalid_argument("divexact by zero");
    mpz_class q, r;
    mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), a.v_.get_mpz_t(), b.v_.get_mpz_t());
    if (sgn(r) != 0) throw std::logic_error("divexact: not divisible");
    return Int(q);
}

Int Int::gcd(const Int& a, const Int& b) {
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), a.v_.get_mpz_t(), b.v_.get_mpz_t());
    return Int(g);
}

Int Int::fdiv_q(const Int& a, const Int& b) {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), a.v_.get_mpz_t(), b.v_.get_mpz_t());
    return Int(q);
}

std::ostream& operator<<(std::ostream& os, const Int& x) { return os << x.raw(); }
std::ostream& operator<<(std::ostream& os, const Rat& x) { return os << x.raw(); }

} // namespace spinetor
