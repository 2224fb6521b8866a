#include "sparsos/monomial.hpp"
#include "sparsos/error.hpp"

#include <algorithm>

namespace sparsos {

Monomial Monomial::var(int i, int e) {
    if (i < 0) throw Error("negative variable index");
    Monomial m;
    if (e < 0) throw Error("negative exponent");
    if (e > 0) {
        m.exps_.emplace_back(i, e);
        m.degree_ = e;
    }
    return m;
}

Monomial Monomial::from_pairs(std::vector<std::pair<int, int>> pairs) {
    std::sort(pairs.begin(), pairs.end());
    Monomial m;
    for (auto& [v, e] : pairs) {
        if (v < 0) throw Error("negative variable index");
        if (e < 0) throw Error("negative exponent");
        if (e == 0) continue;
        if (!m.exps_.empty() && m.exps_.back().first == v)
            m.exps_.back().second += e;
        else
            m.exps_.emplace_back(v, e);
        m.degree_ += e;
    }
    return m;
}

int Monomial::exponent(int var) const {
    for (auto& [v, e] : exps_) {
        if (v == var) return e;
        if (v > var) break;
    }
    return 0;
}

Monomial Monomial::operator*(const Monomial& o) const {
    Monomial r;
    r.exps_.reserve(exps_.size() + o.exps_.size());
    auto a = exps_.begin(), b = o.exps_.begin();
    while (a != exps_.end() || b != o.exps_.end()) {
        if (b == o.exps_.end() || (a != exps_.end() && a->first < b->first))
            r.exps_.push_back(*a++);
        else if (a == exps_.end() || b->first < a->first)
            r.exps_.push_back(*b++);
        else {
            r.exps_.emplace_back(a->first, a->second + b->second);
            ++a;
            ++b;
        }
    }
    r.degree_ = degree_ + o.degree_;
    return r;
}

bool Monomial::divides(const Monomial& o) const {
    for (auto& [v, e] : exps_)
        if (o.exponent(v) < e) return false;
    return true;
}

std::optional<Monomial> Monomial::try_div(const Monomial& o) const {
    if (o.degree_ > degree_) return std::nullopt;
    Monomial r;
    auto b = o.exps_.begin();
    for (auto& [v, e] : exps_) {
        while (b != o.exps_.end() && b->first < v) return std::nullopt;
        int sub = (b != o.exps_.end() && b->first == v) ? b->second : 0;
        if (sub > e) return std::nullopt;
        if (sub > 0) ++b;
        if (e - sub > 0) r.exps_.emplace_back(v, e - sub);
    }
    if (b != o.exps_.end()) return std::nullopt;
    r.degree_ = degree_ - o.degree_;
    return r;
}

bool Monomial::grlex_less(const Monomial& a, const Monomial& b) {
    if (a.degree_ != b.degree_) return a.degree_ < b.degree_;
    // Lexicographic with x1 > x2 > ...: the first variable where the
    // exponents differ decides; the smaller exponent there is the smaller
    // monomial.
    auto i = a.exps_.begin(), j = b.exps_.begin();
    while (i != a.exps_.end() && j != b.exps_.end()) {
        if (i->first != j->first) {
            // The side owning the smaller variable index has a positive
            // exponent where the other has zero.
            return i->first > j->first;
        }
        if (i->second != j->second) return i->second < j->second;
        ++i;
        ++j;
    }
    if (i != a.exps_.end()) return false; // a has an extra (later) variable but same degree: impossible unless... keep strict order
    if (j != b.exps_.end()) return true;
    return false;
}

std::string Monomial::to_string() const {
    if (exps_.empty()) return "1";
    std::string s;
    for (auto& [v, e] : exps_) {
        if (!s.empty()) s += "*";
        s += "x" + std::to_string(v + 1);
        if (e > 1) s += "^" + std::to_string(e);
    }
    return s;
}

} // namespace sparsos
