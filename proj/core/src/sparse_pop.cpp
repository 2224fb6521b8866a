#include "sparsos/sparse_pop.hpp"
#include "sparsos/error.hpp"

#include <algorithm>
#include <ostream>

namespace sparsos {

std::vector<Polynomial> decompose_objective(const Polynomial& f,
                                            const CliqueDecomposition& cd) {
    std::vector<Polynomial> parts(cd.p(), Polynomial::zero(f.nvars(), f.mode()));
    std::vector<std::set<int>> csets;
    csets.reserve(cd.p());
    for (auto& c : cd.cliques) csets.emplace_back(c.begin(), c.end());
    for (auto& [m, c] : f.terms()) {
        int home = -1;
        for (int l = 0; l < cd.p() && home < 0; ++l) {
            bool inside = true;
            for (auto& [v, e] : m.exponents())
                if (!csets[l].count(v)) {
                    inside = false;
                    break;
                }
            if (inside) home = l;
        }
        if (home < 0)
            throw Error("objective monomial " + m.to_string() +
                        " is covered by no clique");
        parts[home].add_term(m, c);
    }
    return parts;
}

std::vector<std::vector<int>> assign_constraints(const std::vector<Polynomial>& g,
                                                 const CliqueDecomposition& cd) {
    std::vector<std::vector<int>> jl(cd.p());
    std::vector<std::set<int>> csets;
    for (auto& c : cd.cliques) csets.emplace_back(c.begin(), c.end());
    for (std::size_t j = 0; j < g.size(); ++j) {
        int home = -1;
        for (int l = 0; l < cd.p() && home < 0; ++l)
            if (g[j].supported_in(csets[l])) home = l;
        if (home < 0)
            throw Error("constraint g" + std::to_string(j + 1) +
                        " is supported in no clique");
        jl[home].push_back(static_cast<int>(j));
    }
    return jl;
}

DenominatorSet build_denominators(const CliqueDecomposition& cd) {
    const int n = cd.nvars;
    const int p = cd.p();
    DenominatorSet ds;
    Polynomial one = Polynomial::constant(n, Coeff(Rational(1)));
    for (int l = 0; l < p; ++l) {
        ds.theta.push_back(squared_norm(n, cd.cliques[l]) + one);
        ds.theta_hat.push_back(squared_norm(n, cd.separators[l]) + one);
    }
    for (int l = 0; l < p; ++l) {
        Polynomial phi = one;
        Polynomial dl = one;
        if (l > 0) {
            phi = phi * squared_norm(n, cd.separators[l]);
            dl = dl * ds.theta_hat[l];
        }
        for (int j = l + 1; j < p; ++j) {
            if (cd.parents[j] == l) {
                phi = phi * squared_norm(n, cd.separators[j]);
                dl = dl * ds.theta_hat[j];
            }
        }
        ds.phi.push_back(phi);
        ds.d.push_back(dl);
        ds.big_theta.push_back(ds.theta[l] * dl);
        ds.h.push_back(squared_norm(n, cd.cliques[l]) * phi);
        ds.omega.push_back(ds.big_theta[l].degree() / 2);
    }
    return ds;
}

bool SparsePop::is_equality_member(int j) const {
    for (auto& [a, b] : equality_pairs)
        if (a == j || b == j) return true;
    return false;
}

SparsePop build_sparse_pop(Polynomial f, std::vector<Polynomial> g,
                           CliqueDecomposition cd) {
    SparsePop pop;
    pop.objective_parts = decompose_objective(f, cd);
    pop.clique_constraints = assign_constraints(g, cd);
    pop.f = std::move(f);
    pop.g = std::move(g);
    pop.cd = std::move(cd);
    for (auto& gj : pop.g) {
        int dg = gj.degree();
        pop.u.push_back(dg <= 0 ? 0 : (dg + 1) / 2);
    }
    // Detect equality pairs g_{j'} = -g_j (each constraint in at most one pair).
    std::vector<bool> taken(pop.g.size(), false);
    for (std::size_t j = 0; j < pop.g.size(); ++j) {
        if (taken[j]) continue;
        for (std::size_t j2 = j + 1; j2 < pop.g.size(); ++j2) {
            if (taken[j2]) continue;
            if (pop.g[j2] == -pop.g[j]) {
                pop.equality_pairs.emplace_back(static_cast<int>(j), static_cast<int>(j2));
                taken[j] = taken[j2] = true;
                break;
            }
        }
    }
    return pop;
}

SizeReport size_report(const SparsePop& pop, int k, int d) {
    if (k < 0 || d < 0) throw Error("size_report: negative order or degree");
    DenominatorSet ds = build_denominators(pop.cd);
    SizeReport r;
    r.k = k;
    r.d = d;
    for (int l = 0; l < pop.cd.p(); ++l) {
        SizeReport::CliqueRow row;
        row.clique = l;
        row.n_l = pop.cd.n_l(l);
        row.omega_l = ds.omega[l];
        row.gram_dim = binomial(static_cast<unsigned>(row.n_l + d + k * row.omega_l),
                                static_cast<unsigned>(row.n_l));
        row.gram_vars = row.gram_dim * (row.gram_dim + 1) / 2;
        r.max_sparse_block = std::max(r.max_sparse_block, row.gram_dim);
        r.sparse_gram_vars += row.gram_vars;
        r.rows.push_back(row);
    }
    const unsigned n = static_cast<unsigned>(pop.nvars());
    r.dense_block = binomial(n + static_cast<unsigned>(d + k), n);
    r.dense_gram_vars = r.dense_block * (r.dense_block + 1) / 2;
    return r;
}

void print_size_report(std::ostream& os, const SizeReport& r) {
    os << "size report (k=" << r.k << ", d=" << r.d << ")\n";
    os << "  clique   n_l  omega_l  gram_dim  gram_vars\n";
    for (auto& row : r.rows)
        os << "  " << row.clique + 1 << "        " << row.n_l << "    " << row.omega_l
           << "        " << row.gram_dim << "         " << row.gram_vars << "\n";
    os << "  largest sparse block: " << r.max_sparse_block << "\n";
    os << "  sparse gram variables: " << r.sparse_gram_vars << "\n";
    os << "  dense block: " << r.dense_block << "\n";
    os << "  dense gram variables: " << r.dense_gram_vars << "\n";
}

} // namespace sparsos
