#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace ctrldisc {

// Arbitrary-precision rational. GMP keeps mpq_class canonical (positive
// denominator, lowest terms) after every arithmetic operation.
using BigRational = mpq_class;
using BigInteger = mpz_class;

inline BigInteger factorial(unsigned long n)
{
    BigInteger r;
    mpz_fac_ui(r.get_mpz_t(), n);
    return r;
}

inline BigInteger binomial(unsigned long n, unsigned long k)
{
    BigInteger r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

inline int sign(const BigRational& q) { return sgn(q); }

/// Always "p/q", also for integers ("0/1", "3/1").
inline std::string to_fraction_string(const BigRational& q)
{
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline BigRational parse_fraction(const std::string& text)
{
    BigRational q;
    if (q.set_str(text, 10) != 0 || q.get_den() == 0)
        throw std::invalid_argument("not a rational literal: " + text);
    q.canonicalize();
    return q;
}

/// Exact value of a finite double.
inline BigRational from_double(double x) { return BigRational(x); }

inline double to_double(const BigRational& q) { return q.get_d(); }

} // namespace ctrldisc
