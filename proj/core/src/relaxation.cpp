#include "sparsos/relaxation.hpp"
#include "sparsos/basis.hpp"
#include "sparsos/error.hpp"

#include <algorithm>
#include <map>

namespace sparsos {

std::string to_string(RelaxMode m) {
    switch (m) {
        case RelaxMode::homogeneous_reznick: return "homogeneous-reznick";
        case RelaxMode::pv_global: return "pv-global";
        case RelaxMode::pv_constrained: return "pv-constrained";
        case RelaxMode::dense_putinar: return "dense-putinar";
    }
    return "?";
}

std::string to_string(Formulation f) {
    return f == Formulation::A ? "A" : "B";
}

RelaxMode relax_mode_from_string(const std::string& s) {
    if (s == "homogeneous-reznick") return RelaxMode::homogeneous_reznick;
    if (s == "pv-global") return RelaxMode::pv_global;
    if (s == "pv-constrained") return RelaxMode::pv_constrained;
    if (s == "dense-putinar") return RelaxMode::dense_putinar;
    throw Error("unknown relaxation mode '" + s + "'");
}

Formulation formulation_from_string(const std::string& s) {
    if (s == "A" || s == "a") return Formulation::A;
    if (s == "B" || s == "b") return Formulation::B;
    throw Error("unknown formulation '" + s + "' (expected A or B)");
}

int RelaxationProblem::free_slot_count() const {
    int n = 0;
    for (auto& f : frees) n += static_cast<int>(f.monos.size());
    return n;
}

int default_degree(RelaxMode mode, const Polynomial& f) {
    int df = f.degree();
    if (df < 0) df = 0;
    switch (mode) {
        case RelaxMode::pv_global: return (df + 1) / 2;
        case RelaxMode::pv_constrained: return 1 + df / 2;
        case RelaxMode::homogeneous_reznick:
            if (df % 2 != 0) throw Error("a positive definite form has even degree");
            return df / 2;
        case RelaxMode::dense_putinar: return (df + 1) / 2;
    }
    return 0;
}

namespace {

Coeff one_exact() { return Coeff(Rational(1)); }

std::vector<int> home_clique_of_pairs(const SparsePop& pop) {
    // For each equality pair, the clique its positive member was assigned to.
    std::vector<int> home(pop.equality_pairs.size(), -1);
    for (std::size_t e = 0; e < pop.equality_pairs.size(); ++e) {
        int j = pop.equality_pairs[e].first;
        for (int l = 0; l < pop.cd.p(); ++l)
            for (int jj : pop.clique_constraints[l])
                if (jj == j) home[e] = l;
    }
    return home;
}

// Shared assembly of the Putinar-Vasilescu relaxations (global and
// constrained differ only in the presence of constraint multipliers).
RelaxationProblem build_pv(const SparsePop& pop, const Rational& eps, int d, int k,
                           Formulation form, std::optional<Rational> lambda_fixed,
                           bool constrained) {
    if (k < 0) throw Error("relaxation order k must be nonnegative");
    if (eps < 0) throw Error("epsilon must be nonnegative");
    const int n = pop.nvars();
    const int p = pop.cd.p();

    RelaxationProblem rp;
    rp.mode = constrained ? RelaxMode::pv_constrained : RelaxMode::pv_global;
    rp.form = form;
    rp.k = k;
    rp.d = d;
    rp.eps = eps;
    rp.lambda_fixed = lambda_fixed;
    rp.has_lambda = !lambda_fixed.has_value();
    rp.pop = pop;
    rp.dens = build_denominators(pop.cd);

    std::vector<Polynomial> theta_k; // BigTheta_l^k
    for (int l = 0; l < p; ++l) theta_k.push_back(rp.dens.big_theta[l].pow(k));

    // eps * sum theta_l^d, expanded exactly.
    Polynomial pert = Polynomial::zero(n);
    for (int l = 0; l < p; ++l) pert = pert + rp.dens.theta[l].pow(d).scaled(Coeff(eps));

    auto sigma0_basis = [&](int l) {
        return monomials_upto(pop.cd.cliques[l], d + k * rp.dens.omega[l]);
    };

    std::vector<int> pair_home = home_clique_of_pairs(pop);

    if (form == Formulation::A) {
        rp.ngroups = 1;
        Polynomial big = Polynomial::constant(n, one_exact()); // prod_m BigTheta_m^k
        for (int l = 0; l < p; ++l) big = big * theta_k[l];
        Polynomial base = pop.f + pert;
        if (lambda_fixed)
            base = base - Polynomial::constant(n, Coeff(*lambda_fixed));
        rp.rhs.push_back(base * big);

        std::vector<Polynomial> others; // P_l = prod_{m != l} BigTheta_m^k
        for (int l = 0; l < p; ++l) {
            Polynomial pl = Polynomial::constant(n, one_exact());
            for (int m = 0; m < p; ++m)
                if (m != l) pl = pl * theta_k[m];
            others.push_back(pl);
        }

        for (int l = 0; l < p; ++l)
            rp.grams.push_back({l, -1, sigma0_basis(l), 0, others[l]});

        if (constrained) {
            for (int l = 0; l < p; ++l) {
                for (int j : pop.clique_constraints[l]) {
                    if (pop.is_equality_member(j)) continue;
                    int bound = d + k * rp.dens.omega[l] - pop.u[j];
                    if (bound < 0) {
                        rp.warnings.push_back("multiplier for g" + std::to_string(j + 1) +
                                              " omitted: degree bound negative");
                        continue;
                    }
                    rp.grams.push_back({l, j, monomials_upto(pop.cd.cliques[l], bound), 0,
                                        pop.g[j] * others[l]});
                }
            }
            for (std::size_t e = 0; e < pop.equality_pairs.size(); ++e) {
                int j = pop.equality_pairs[e].first;
                int l = pair_home[e];
                int bound = d + k * rp.dens.omega[l] - pop.u[j];
                if (bound < 0) {
                    rp.warnings.push_back("free multiplier for equality pair g" +
                                          std::to_string(j + 1) + " omitted");
                    continue;
                }
                FreeBlock fb;
                fb.kind = FreeKind::eq_multiplier;
                fb.clique = l;
                fb.constraint = j;
                fb.monos = monomials_upto(pop.cd.cliques[l], 2 * bound);
                fb.mults.emplace_back(0, pop.g[j] * others[l]);
                rp.frees.push_back(std::move(fb));
            }
        }
        if (rp.has_lambda) {
            FreeBlock fb;
            fb.kind = FreeKind::lambda;
            fb.clique = 0;
            fb.monos = {Monomial::one()};
            fb.mults.emplace_back(0, big);
            rp.frees.push_back(std::move(fb));
        }
    } else {
        rp.ngroups = p;
        for (int l = 0; l < p; ++l) {
            Polynomial base =
                pop.objective_parts[l] + rp.dens.theta[l].pow(d).scaled(Coeff(eps));
            if (l == 0 && lambda_fixed)
                base = base - Polynomial::constant(n, Coeff(*lambda_fixed));
            rp.rhs.push_back(theta_k[l] * base);
        }
        for (int l = 0; l < p; ++l)
            rp.grams.push_back(
                {l, -1, sigma0_basis(l), l, Polynomial::constant(n, one_exact())});
        if (constrained) {
            for (int l = 0; l < p; ++l) {
                for (int j : pop.clique_constraints[l]) {
                    if (pop.is_equality_member(j)) continue;
                    int bound = d + k * rp.dens.omega[l] - pop.u[j];
                    if (bound < 0) {
                        rp.warnings.push_back("multiplier for g" + std::to_string(j + 1) +
                                              " omitted: degree bound negative");
                        continue;
                    }
                    rp.grams.push_back(
                        {l, j, monomials_upto(pop.cd.cliques[l], bound), l, pop.g[j]});
                }
            }
            for (std::size_t e = 0; e < pop.equality_pairs.size(); ++e) {
                int j = pop.equality_pairs[e].first;
                int l = pair_home[e];
                int bound = d + k * rp.dens.omega[l] - pop.u[j];
                if (bound < 0) {
                    rp.warnings.push_back("free multiplier for equality pair g" +
                                          std::to_string(j + 1) + " omitted");
                    continue;
                }
                FreeBlock fb;
                fb.kind = FreeKind::eq_multiplier;
                fb.clique = l;
                fb.constraint = j;
                fb.monos = monomials_upto(pop.cd.cliques[l], 2 * bound);
                fb.mults.emplace_back(l, pop.g[j]);
                rp.frees.push_back(std::move(fb));
            }
        }
        // Transfer polynomials psi_l on x(hat I_l), degree <= 2(d+k); each
        // enters its own clique's identity and its parent's with opposite
        // signs, scaled by the exact quotients BigTheta^k / theta_hat_l^k.
        for (int l = 1; l < p; ++l) {
            int s = pop.cd.parents[l];
            Polynomial own_q =
                (rp.dens.theta[l] * rp.dens.d[l].exact_div(rp.dens.theta_hat[l])).pow(k);
            Polynomial par_q =
                (rp.dens.theta[s] * rp.dens.d[s].exact_div(rp.dens.theta_hat[l])).pow(k);
            FreeBlock fb;
            fb.kind = FreeKind::transfer;
            fb.clique = l;
            fb.monos = monomials_upto(pop.cd.separators[l], 2 * (d + k));
            fb.mults.emplace_back(l, -own_q);
            fb.mults.emplace_back(s, par_q);
            rp.frees.push_back(std::move(fb));
        }
        if (rp.has_lambda) {
            FreeBlock fb;
            fb.kind = FreeKind::lambda;
            fb.clique = 0;
            fb.monos = {Monomial::one()};
            fb.mults.emplace_back(0, theta_k[0]);
            rp.frees.push_back(std::move(fb));
        }
    }
    return rp;
}

} // namespace

RelaxationProblem build_pv_global(const SparsePop& pop, const Rational& eps, int d, int k,
                                  Formulation form, std::optional<Rational> lambda_fixed) {
    if (!pop.g.empty()) throw Error("build_pv_global expects an unconstrained problem");
    int df = pop.f.degree();
    if (df > 0 && d < (df + 1) / 2)
        throw Error("degree d must satisfy d >= ceil(deg(f)/2)");
    return build_pv(pop, eps, d, k, form, lambda_fixed, false);
}

RelaxationProblem build_pv_constrained(const SparsePop& pop, const Rational& eps, int d,
                                       int k, Formulation form,
                                       std::optional<Rational> lambda_fixed) {
    int df = std::max(0, pop.f.degree());
    if (d < 1 + df / 2) throw Error("degree d must satisfy d >= 1 + floor(deg(f)/2)");
    return build_pv(pop, eps, d, k, form, lambda_fixed, true);
}

RelaxationProblem build_homogeneous_reznick(const RationalFormSum& input,
                                            const CliqueDecomposition& cd, int k) {
    const int p = cd.p();
    if (static_cast<int>(input.p.size()) != p || static_cast<int>(input.kl.size()) != p)
        throw Error("rational form sum must provide one numerator per clique");
    if (input.d <= 0) throw Error("positive definite rational forms have degree 2d >= 2");
    const int n = cd.nvars;

    RelaxationProblem rp;
    rp.mode = RelaxMode::homogeneous_reznick;
    rp.form = Formulation::A;
    rp.k = k;
    rp.d = input.d;
    rp.reznick_kl = input.kl;
    rp.dens = build_denominators(cd);

    std::vector<Polynomial> g_empty;
    rp.pop = build_sparse_pop(Polynomial::zero(n), g_empty, cd);
    // Keep the rational-form numerators as the objective split.
    rp.pop.objective_parts = input.p;
    for (auto& pl : input.p) rp.pop.f = rp.pop.f + pl;

    for (int l = 0; l < p; ++l) {
        if (input.kl[l] < 0) throw Error("denominator exponent k_l must be nonnegative");
        if (k < input.kl[l]) throw Error("order k must satisfy k >= max k_l");
        const Polynomial& pl = input.p[l];
        if (!pl.is_homogeneous())
            throw Error("numerator p" + std::to_string(l + 1) + " is not homogeneous");
        if (!pl.is_zero() && pl.degree() != 2 * (input.d + input.kl[l]))
            throw Error("numerator p" + std::to_string(l + 1) +
                        " has degree != 2(d + k_l)");
        std::set<int> cset(cd.cliques[l].begin(), cd.cliques[l].end());
        if (!pl.supported_in(cset))
            throw Error("numerator p" + std::to_string(l + 1) +
                        " is not supported in its clique");
        if (l > 0 && cd.separators[l].empty())
            throw Error("clique " + std::to_string(l + 1) +
                        " has an empty separator: the uniform denominator "
                        "Phi_l vanishes (decomposition must be connected)");
    }

    std::vector<Polynomial> h_k;
    for (int l = 0; l < p; ++l) h_k.push_back(rp.dens.h[l].pow(k));

    std::vector<Polynomial> others;
    for (int l = 0; l < p; ++l) {
        Polynomial pl = Polynomial::constant(n, one_exact());
        for (int m = 0; m < p; ++m)
            if (m != l) pl = pl * h_k[m];
        others.push_back(pl);
    }

    rp.ngroups = 1;
    Polynomial rhs = Polynomial::zero(n);
    for (int l = 0; l < p; ++l) {
        Polynomial norm_pow = squared_norm(n, cd.cliques[l]).pow(k - input.kl[l]);
        rhs = rhs + input.p[l] * norm_pow * rp.dens.phi[l].pow(k) * others[l];
    }
    rp.rhs.push_back(rhs);

    for (int l = 0; l < p; ++l) {
        int deg = input.d + k * (1 + rp.dens.phi[l].degree() / 2);
        rp.grams.push_back({l, -1, monomials_exact(cd.cliques[l], deg), 0, others[l]});
    }
    return rp;
}

RelaxationProblem build_dense_putinar(const Polynomial& f, const std::vector<Polynomial>& g,
                                      int k, std::optional<Rational> lambda_fixed) {
    if (k < 0) throw Error("relaxation order k must be nonnegative");
    if (f.degree() > 2 * k)
        throw Error("2k < deg(f): the order-" + std::to_string(k) +
                    " dense program cannot match the objective degree");
    const int n = f.nvars();
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    CliqueDecomposition cd = make_decomposition(std::max(n, 1), {all.empty() ? std::vector<int>{0} : all});

    RelaxationProblem rp;
    rp.mode = RelaxMode::dense_putinar;
    rp.form = Formulation::A;
    rp.k = k;
    rp.d = 0;
    rp.lambda_fixed = lambda_fixed;
    rp.has_lambda = !lambda_fixed.has_value();
    rp.pop = build_sparse_pop(f, g, cd);
    rp.dens = build_denominators(cd);
    rp.ngroups = 1;

    Polynomial rhs = f;
    if (lambda_fixed) rhs = rhs - Polynomial::constant(n, Coeff(*lambda_fixed));
    rp.rhs.push_back(rhs);

    rp.grams.push_back({0, -1, monomials_upto(all, k), 0,
                        Polynomial::constant(n, one_exact())});
    for (std::size_t j = 0; j < rp.pop.g.size(); ++j) {
        if (rp.pop.is_equality_member(static_cast<int>(j))) continue;
        int bound = k - rp.pop.u[j];
        if (bound < 0) {
            rp.warnings.push_back("multiplier for g" + std::to_string(j + 1) +
                                  " omitted: degree bound negative");
            continue;
        }
        rp.grams.push_back({0, static_cast<int>(j), monomials_upto(all, bound), 0,
                            rp.pop.g[j]});
    }
    for (auto& [j, j2] : rp.pop.equality_pairs) {
        int bound = k - rp.pop.u[j];
        if (bound < 0) {
            rp.warnings.push_back("free multiplier for equality pair g" +
                                  std::to_string(j + 1) + " omitted");
            continue;
        }
        FreeBlock fb;
        fb.kind = FreeKind::eq_multiplier;
        fb.clique = 0;
        fb.constraint = j;
        fb.monos = monomials_upto(all, 2 * bound);
        fb.mults.emplace_back(0, rp.pop.g[j]);
        rp.frees.push_back(std::move(fb));
    }
    if (rp.has_lambda) {
        FreeBlock fb;
        fb.kind = FreeKind::lambda;
        fb.clique = 0;
        fb.monos = {Monomial::one()};
        fb.mults.emplace_back(0, Polynomial::constant(n, one_exact()));
        rp.frees.push_back(std::move(fb));
    }
    return rp;
}

namespace {

struct RowKeyLess {
    bool operator()(const std::pair<int, Monomial>& a,
                    const std::pair<int, Monomial>& b) const {
        if (a.first != b.first) return a.first < b.first;
        return Monomial::grlex_less(a.second, b.second);
    }
};

} // namespace

SdpLift lift_to_sdp(const RelaxationProblem& rp) {
    std::map<std::pair<int, Monomial>, int, RowKeyLess> rowmap;
    auto touch = [&](int group, const Monomial& m) {
        rowmap.emplace(std::make_pair(group, m), 0);
    };

    for (int q = 0; q < rp.ngroups; ++q)
        for (auto& [m, c] : rp.rhs[q].terms()) touch(q, m);
    for (auto& gb : rp.grams) {
        const auto& basis = gb.basis;
        for (std::size_t a = 0; a < basis.size(); ++a)
            for (std::size_t b2 = a; b2 < basis.size(); ++b2) {
                Monomial ab = basis[a] * basis[b2];
                for (auto& [mc, c] : gb.mult.terms()) touch(gb.group, ab * mc);
            }
    }
    for (auto& fb : rp.frees)
        for (auto& mono : fb.monos)
            for (auto& [q, mult] : fb.mults)
                for (auto& [mc, c] : mult.terms()) touch(q, mono * mc);

    SdpLift lift;
    int idx = 0;
    for (auto& [key, v] : rowmap) {
        v = idx++;
        lift.rows.push_back(key);
    }

    SdpInstance& inst = lift.inst;
    const int m = idx;
    inst.constraints.resize(m);
    inst.b.assign(m, 0.0);
    for (int q = 0; q < rp.ngroups; ++q)
        for (auto& [mono, c] : rp.rhs[q].terms())
            inst.b[rowmap.at({q, mono})] = c.to_double();

    for (auto& gb : rp.grams) inst.block_sizes.push_back(static_cast<int>(gb.basis.size()));
    inst.nfree = rp.free_slot_count();
    inst.c_free.assign(inst.nfree, 0.0);

    for (std::size_t bi = 0; bi < rp.grams.size(); ++bi) {
        const auto& gb = rp.grams[bi];
        const auto& basis = gb.basis;
        for (std::size_t a = 0; a < basis.size(); ++a)
            for (std::size_t b2 = a; b2 < basis.size(); ++b2) {
                Monomial ab = basis[a] * basis[b2];
                for (auto& [mc, c] : gb.mult.terms()) {
                    int row = rowmap.at({gb.group, ab * mc});
                    inst.constraints[row].psd.push_back(
                        {static_cast<int>(bi), static_cast<int>(a), static_cast<int>(b2),
                         c.to_double()});
                }
            }
    }

    int slot = 0;
    for (auto& fb : rp.frees) {
        for (auto& mono : fb.monos) {
            for (auto& [q, mult] : fb.mults)
                for (auto& [mc, c] : mult.terms()) {
                    int row = rowmap.at({q, mono * mc});
                    inst.constraints[row].free_terms.emplace_back(slot, c.to_double());
                }
            if (fb.kind == FreeKind::lambda && rp.has_lambda) inst.c_free[slot] = 1.0;
            ++slot;
        }
    }
    inst.validate();
    return lift;
}

} // namespace sparsos
