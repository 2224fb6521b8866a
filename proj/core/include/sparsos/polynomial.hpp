#ifndef SPARSOS_POLYNOMIAL_HPP
#define SPARSOS_POLYNOMIAL_HPP

#include "sparsos/coeff.hpp"
#include "sparsos/monomial.hpp"

#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace sparsos {

// Degree of the zero polynomial ("negative infinity").
inline constexpr int kDegNegInf = std::numeric_limits<int>::min();

// Sparse multivariate polynomial over exact rationals or binary64 floats.
// Terms are kept in a canonical graded-lexicographic map with no zero
// coefficients; all variable indices are < nvars.
class Polynomial {
public:
    using TermMap = std::map<Monomial, Coeff, GrlexLess>;

    explicit Polynomial(int nvars = 0, CoeffMode mode = CoeffMode::exact);

    static Polynomial zero(int nvars, CoeffMode mode = CoeffMode::exact);
    static Polynomial constant(int nvars, Coeff c);
    static Polynomial variable(int nvars, int i, CoeffMode mode = CoeffMode::exact);
    static Polynomial term(int nvars, Monomial m, Coeff c);

    int nvars() const { return nvars_; }
    CoeffMode mode() const { return mode_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }

    // kDegNegInf for the zero polynomial.
    int degree() const;
    bool is_homogeneous() const;

    Coeff coeff(const Monomial& m) const;
    void add_term(const Monomial& m, const Coeff& c);

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial operator-() const;
    bool operator==(const Polynomial& o) const;
    bool operator!=(const Polynomial& o) const { return !(*this == o); }

    Polynomial scaled(const Coeff& c) const;
    Polynomial mul_monomial(const Monomial& m, const Coeff& c) const;
    Polynomial pow(unsigned e) const;

    // Exact quotient; throws if the division leaves a remainder.
    Polynomial exact_div(const Polynomial& divisor) const;

    Coeff evaluate(const std::vector<Coeff>& point) const;

    // x_{n+1}^d * p(x / x_{n+1}): a form of degree d in nvars+1 variables.
    Polynomial homogenize(int d) const;
    // Substitutes 1 for the last variable; nvars decreases by one.
    Polynomial dehomogenize() const;

    Coeff one_norm() const;
    std::set<int> support_vars() const;
    bool supported_in(const std::set<int>& vars) const;

    Polynomial to_float() const;
    // Best rational per coefficient with denominator <= max_den; result is exact.
    Polynomial round_coeffs(const Integer& max_den) const;
    Polynomial to_exact() const; // float -> exact (dyadic), exact -> copy

    // Widen/narrow the ambient variable count (narrowing requires unused vars).
    Polynomial with_nvars(int nvars) const;

    std::string to_string() const;

    // Grammar: expr := term (('+'|'-') term)*; term := coeff ('*' factor)* |
    // factor ('*' factor)*; factor := var ('^' uint)?; var := 'x' uint
    // (1-based); coeff := int | int '/' uint | decimal. A leading sign on the
    // first term is accepted. Whitespace is insignificant.
    static Polynomial parse(const std::string& text, int nvars,
                            CoeffMode mode = CoeffMode::exact);

private:
    void check_compat(const Polynomial& o) const;
    int nvars_;
    CoeffMode mode_;
    TermMap terms_;
};

// Sum of x_i^2 over a variable subset (exact mode).
Polynomial squared_norm(int nvars, const std::vector<int>& vars);

} // namespace sparsos

#endif
