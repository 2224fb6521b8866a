#include "sparsos/basis.hpp"

#include <algorithm>

namespace sparsos {

namespace {

void enumerate(const std::vector<int>& vars, std::size_t pos, int remaining,
               std::vector<std::pair<int, int>>& cur, std::vector<Monomial>& out,
               bool exact) {
    if (pos == vars.size()) {
        if (!exact || remaining == 0) out.push_back(Monomial::from_pairs(cur));
        return;
    }
    for (int e = 0; e <= remaining; ++e) {
        if (e > 0) cur.emplace_back(vars[pos], e);
        enumerate(vars, pos + 1, remaining - e, cur, out, exact);
        if (e > 0) cur.pop_back();
    }
}

std::vector<Monomial> build(const std::vector<int>& vars, int deg, bool exact) {
    std::vector<Monomial> out;
    if (deg < 0) return out;
    std::vector<int> sorted = vars;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::pair<int, int>> cur;
    enumerate(sorted, 0, deg, cur, out, exact);
    std::sort(out.begin(), out.end(), GrlexLess{});
    return out;
}

} // namespace

std::vector<Monomial> monomials_upto(const std::vector<int>& vars, int deg) {
    return build(vars, deg, false);
}

std::vector<Monomial> monomials_exact(const std::vector<int>& vars, int deg) {
    return build(vars, deg, true);
}

} // namespace sparsos
