#ifndef SPARSOS_RATIONAL_HPP
#define SPARSOS_RATIONAL_HPP

#include <gmpxx.h>
#include <cstdint>
#include <string>

namespace sparsos {

// Arbitrary-precision rational, always stored canonically (reduced, positive
// denominator). mpq_class maintains that invariant for us.
using Rational = mpq_class;
using Integer = mpz_class;

Rational rat_pow(const Rational& base, unsigned long e);
Rational rat_abs(const Rational& x);
double rat_to_double(const Rational& x);

// Exact conversion: every finite double is a dyadic rational.
Rational rat_from_double(double x);

// Best rational approximation to x with denominator <= max_den (max_den >= 1),
// via continued-fraction convergents and the final semiconvergent. Ties are
// broken toward the smaller denominator.
Rational rat_best_approx(const Rational& x, const Integer& max_den);

// Accepts "p", "p/q" and decimal strings like "-1.25" or "3.".
Rational rat_parse(const std::string& text);

// "p" or "p/q".
std::string rat_to_string(const Rational& x);

// Shortest decimal form that round-trips through double.
std::string double_to_string(double x);

std::uint64_t binomial(unsigned n, unsigned k);

} // namespace sparsos

#endif
