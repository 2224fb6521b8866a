#ifndef SPARSOS_COEFF_HPP
#define SPARSOS_COEFF_HPP

#include "sparsos/rational.hpp"

#include <string>
#include <variant>

namespace sparsos {

enum class CoeffMode { exact, floating };

std::string to_string(CoeffMode m);

// Tagged coefficient: exact arbitrary-precision rational or binary64 float.
// A polynomial holds coefficients of a single mode; mixing modes in
// arithmetic is an error.
class Coeff {
public:
    Coeff() : v_(Rational(0)) {}
    explicit Coeff(Rational r) : v_(std::move(r)) {}
    explicit Coeff(double d) : v_(d) {}
    static Coeff exact(long n, long d = 1) { return Coeff(Rational(n, d)); }
    static Coeff zero(CoeffMode m) { return m == CoeffMode::exact ? Coeff(Rational(0)) : Coeff(0.0); }
    static Coeff one(CoeffMode m) { return m == CoeffMode::exact ? Coeff(Rational(1)) : Coeff(1.0); }

    CoeffMode mode() const { return std::holds_alternative<Rational>(v_) ? CoeffMode::exact : CoeffMode::floating; }
    bool is_exact() const { return mode() == CoeffMode::exact; }
    bool is_zero() const;

    const Rational& rat() const;
    double flt() const;
    double to_double() const;

    Coeff operator+(const Coeff& o) const;
    Coeff operator-(const Coeff& o) const;
    Coeff operator*(const Coeff& o) const;
    Coeff operator/(const Coeff& o) const;
    Coeff operator-() const;
    Coeff abs() const;
    Coeff pow(unsigned long e) const;

    bool operator==(const Coeff& o) const;
    bool operator!=(const Coeff& o) const { return !(*this == o); }
    // Order comparison requires matching modes.
    bool operator<(const Coeff& o) const;

    std::string to_string() const;

private:
    void check_mode(const Coeff& o) const;
    std::variant<Rational, double> v_;
};

} // namespace sparsos

#endif
