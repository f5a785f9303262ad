#pragma once

#include <gmpxx.h>

#include <complex>
#include <string>
#include <string_view>

namespace ctk {

using Rational = mpq_class;
using Integer = mpz_class;
using Complex = std::complex<double>;

// Parses "p/q", "p", or a finite decimal like "0.25"; always canonical.
Rational parse_rational(std::string_view text);

// "p/q" or "p" when the denominator is one.
std::string to_string(const Rational& q);

bool is_integer(const Rational& q);

// Exact square root when q is the square of a rational.
bool exact_sqrt(const Rational& q, Rational& root);

Integer factorial(unsigned n);
Integer double_factorial(long n);  // (-1)!! = 0!! = 1

// Generalized binomial coefficient binom(x, k) = x(x-1)...(x-k+1)/k!.
Rational binomial(const Rational& x, unsigned k);
double binomial(double x, unsigned k);

inline double to_double(const Rational& q) { return q.get_d(); }

// Scalar traits shared by the complex and exact backends.
inline Complex conj_of(const Complex& z) { return std::conj(z); }
inline Rational conj_of(const Rational& q) { return q; }
inline double magnitude(const Complex& z) { return std::abs(z); }
inline double magnitude(const Rational& q) { return std::abs(q.get_d()); }
inline Complex to_complex(const Complex& z) { return z; }
inline Complex to_complex(const Rational& q) { return {q.get_d(), 0.0}; }

}  // namespace ctk
