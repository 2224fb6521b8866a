#include "sparsos/coeff.hpp"
#include "sparsos/error.hpp"

#include <cmath>

namespace sparsos {

std::string to_string(CoeffMode m) {
    return m == CoeffMode::exact ? "exact" : "float";
}

bool Coeff::is_zero() const {
    if (is_exact()) return sgn(std::get<Rational>(v_)) == 0;
    return std::get<double>(v_) == 0.0;
}

const Rational& Coeff::rat() const {
    if (!is_exact()) throw Error("coefficient is not exact");
    return std::get<Rational>(v_);
}

double Coeff::flt() const {
    if (is_exact()) throw Error("coefficient is not floating");
    return std::get<double>(v_);
}

double Coeff::to_double() const {
    return is_exact() ? rat_to_double(std::get<Rational>(v_)) : std::get<double>(v_);
}

void Coeff::check_mode(const Coeff& o) const {
    if (mode() != o.mode())
        throw Error("coefficient mode mismatch (exact vs float)");
}

Coeff Coeff::operator+(const Coeff& o) const {
    check_mode(o);
    if (is_exact()) return Coeff(Rational(rat() + o.rat()));
    return Coeff(flt() + o.flt());
}

Coeff Coeff::operator-(const Coeff& o) const {
    check_mode(o);
    if (is_exact()) return Coeff(Rational(rat() - o.rat()));
    return Coeff(flt() - o.flt());
}

Coeff Coeff::operator*(const Coeff& o) const {
    check_mode(o);
    if (is_exact()) return Coeff(Rational(rat() * o.rat()));
    return Coeff(flt() * o.flt());
}

Coeff Coeff::operator/(const Coeff& o) const {
    check_mode(o);
    if (o.is_zero()) throw Error("coefficient division by zero");
    if (is_exact()) return Coeff(Rational(rat() / o.rat()));
    return Coeff(flt() / o.flt());
}

Coeff Coeff::operator-() const {
    if (is_exact()) return Coeff(Rational(-rat()));
    return Coeff(-flt());
}

Coeff Coeff::abs() const {
    if (is_exact()) return Coeff(rat_abs(rat()));
    return Coeff(std::fabs(flt()));
}

Coeff Coeff::pow(unsigned long e) const {
    if (is_exact()) return Coeff(rat_pow(rat(), e));
    return Coeff(std::pow(flt(), static_cast<double>(e)));
}

bool Coeff::operator==(const Coeff& o) const {
    if (mode() != o.mode()) return false;
    if (is_exact()) return rat() == o.rat();
    return flt() == o.flt();
}

bool Coeff::operator<(const Coeff& o) const {
    check_mode(o);
    if (is_exact()) return rat() < o.rat();
    return flt() < o.flt();
}

std::string Coeff::to_string() const {
    return is_exact() ? rat_to_string(rat()) : double_to_string(flt());
}

} // namespace sparsos
