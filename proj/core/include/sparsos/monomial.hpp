#ifndef SPARSOS_MONOMIAL_HPP
#define SPARSOS_MONOMIAL_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sparsos {

// Power product x^alpha with sparse exponent storage: (variable index,
// exponent) pairs sorted by variable, exponents strictly positive.
// Variable indices are 0-based internally; text form is 1-based (x1, x2, ...).
class Monomial {
public:
    Monomial() = default;
    static Monomial one() { return Monomial(); }
    static Monomial var(int i, int e = 1);
    static Monomial from_pairs(std::vector<std::pair<int, int>> pairs);

    int degree() const { return degree_; }
    bool is_one() const { return exps_.empty(); }
    int exponent(int var) const;
    const std::vector<std::pair<int, int>>& exponents() const { return exps_; }
    int max_var() const { return exps_.empty() ? -1 : exps_.back().first; }

    Monomial operator*(const Monomial& o) const;
    bool divides(const Monomial& o) const; // this | o
    std::optional<Monomial> try_div(const Monomial& o) const; // this / o

    // Graded lexicographic: degree first, then lexicographic with x1 > x2 > ...
    static bool grlex_less(const Monomial& a, const Monomial& b);

    bool operator==(const Monomial& o) const { return exps_ == o.exps_; }
    bool operator!=(const Monomial& o) const { return !(*this == o); }

    std::string to_string() const; // "x1^2*x3", "1" for the unit

private:
    std::vector<std::pair<int, int>> exps_;
    int degree_ = 0;
};

struct GrlexLess {
    bool operator()(const Monomial& a, const Monomial& b) const {
        return Monomial::grlex_less(a, b);
    }
};

} // namespace sparsos

#endif
