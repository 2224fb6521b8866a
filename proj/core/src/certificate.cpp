#include "sparsos/certificate.hpp"
#include "sparsos/basis.hpp"
#include "sparsos/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace sparsos {

namespace {

struct SystemTerm {
    std::vector<std::pair<int, Polynomial>> mults; // (group, exact multiplier)
};

// The certificate identity, with lambda folded into the right-hand sides:
//   sum_g sigma_g * mult_g + sum_f poly_f * mult_f = rhs_q   for each group q.
struct CertSystem {
    int ngroups = 1;
    std::vector<Polynomial> rhs;
    std::vector<SystemTerm> gram_terms;
    std::vector<SystemTerm> free_terms;
    SparsePop pop;
    DenominatorSet dens;
};

Rational coeff_to_rational(const Coeff& c) {
    return c.is_exact() ? c.rat() : rat_from_double(c.flt());
}

CertSystem build_cert_system(const SparseCertificate& cert) {
    CertSystem sys;
    const int n = cert.nvars;
    Polynomial f = cert.objective;
    if (cert.mode == RelaxMode::homogeneous_reznick) {
        f = Polynomial::zero(n);
        for (auto& pl : cert.reznick_parts) f = f + pl;
    }
    sys.pop = build_sparse_pop(f, cert.constraints, cert.cd);
    sys.dens = build_denominators(cert.cd);
    const int p = cert.cd.p();
    const int k = cert.k;
    Rational lam = cert.lambda ? coeff_to_rational(*cert.lambda) : Rational(0);

    auto mult_for = [&](const CertGram& g, const Polynomial& context) {
        if (g.constraint < 0) return context;
        if (g.constraint >= static_cast<int>(cert.constraints.size()))
            throw Error("certificate gram references an unknown constraint");
        return cert.constraints[g.constraint] * context;
    };

    if (cert.mode == RelaxMode::dense_putinar) {
        sys.ngroups = 1;
        Polynomial rhs = f;
        if (cert.lambda) rhs = rhs - Polynomial::constant(n, Coeff(lam));
        sys.rhs.push_back(rhs);
        Polynomial one = Polynomial::constant(n, Coeff(Rational(1)));
        for (auto& g : cert.grams)
            sys.gram_terms.push_back({{{0, mult_for(g, one)}}});
        for (auto& fb : cert.frees) {
            if (fb.kind != FreeKind::eq_multiplier)
                throw Error("dense certificates admit only equality multipliers");
            sys.free_terms.push_back({{{0, cert.constraints.at(fb.constraint) * one}}});
        }
        return sys;
    }

    if (cert.mode == RelaxMode::homogeneous_reznick) {
        sys.ngroups = 1;
        std::vector<Polynomial> h_k;
        for (int l = 0; l < p; ++l) h_k.push_back(sys.dens.h[l].pow(k));
        std::vector<Polynomial> others;
        for (int l = 0; l < p; ++l) {
            Polynomial pl = Polynomial::constant(n, Coeff(Rational(1)));
            for (int m = 0; m < p; ++m)
                if (m != l) pl = pl * h_k[m];
            others.push_back(pl);
        }
        if (static_cast<int>(cert.reznick_parts.size()) != p ||
            static_cast<int>(cert.reznick_kl.size()) != p)
            throw Error("homogeneous certificate must carry one numerator and k_l per clique");
        Polynomial rhs = Polynomial::zero(n);
        for (int l = 0; l < p; ++l) {
            int kl = cert.reznick_kl[l];
            if (kl < 0 || kl > k) throw Error("invalid k_l in certificate");
            rhs = rhs + cert.reznick_parts[l] * squared_norm(n, cert.cd.cliques[l]).pow(k - kl) *
                            sys.dens.phi[l].pow(k) * others[l];
        }
        sys.rhs.push_back(rhs);
        for (auto& g : cert.grams) {
            if (g.constraint >= 0)
                throw Error("homogeneous certificates have no constraint multipliers");
            sys.gram_terms.push_back({{{0, others.at(g.clique)}}});
        }
        if (!cert.frees.empty())
            throw Error("homogeneous certificates have no free polynomials");
        return sys;
    }

    // Putinar-Vasilescu modes.
    std::vector<Polynomial> theta_k;
    for (int l = 0; l < p; ++l) theta_k.push_back(sys.dens.big_theta[l].pow(k));
    Polynomial pert = Polynomial::zero(n);
    for (int l = 0; l < p; ++l)
        pert = pert + sys.dens.theta[l].pow(cert.d).scaled(Coeff(cert.eps));

    if (cert.form == Formulation::A) {
        sys.ngroups = 1;
        Polynomial big = Polynomial::constant(n, Coeff(Rational(1)));
        for (int l = 0; l < p; ++l) big = big * theta_k[l];
        Polynomial base = f + pert;
        if (cert.lambda) base = base - Polynomial::constant(n, Coeff(lam));
        sys.rhs.push_back(base * big);
        std::vector<Polynomial> others;
        for (int l = 0; l < p; ++l) {
            Polynomial pl = Polynomial::constant(n, Coeff(Rational(1)));
            for (int m = 0; m < p; ++m)
                if (m != l) pl = pl * theta_k[m];
            others.push_back(pl);
        }
        for (auto& g : cert.grams)
            sys.gram_terms.push_back({{{0, mult_for(g, others.at(g.clique))}}});
        for (auto& fb : cert.frees) {
            if (fb.kind == FreeKind::transfer)
                throw Error("formulation A certificates have no transfer polynomials");
            sys.free_terms.push_back(
                {{{0, cert.constraints.at(fb.constraint) * others.at(fb.clique)}}});
        }
    } else {
        sys.ngroups = p;
        for (int l = 0; l < p; ++l) {
            Polynomial base = sys.pop.objective_parts[l] +
                              sys.dens.theta[l].pow(cert.d).scaled(Coeff(cert.eps));
            if (l == 0 && cert.lambda)
                base = base - Polynomial::constant(n, Coeff(lam));
            sys.rhs.push_back(theta_k[l] * base);
        }
        Polynomial one = Polynomial::constant(n, Coeff(Rational(1)));
        for (auto& g : cert.grams)
            sys.gram_terms.push_back({{{g.clique, mult_for(g, one)}}});
        for (auto& fb : cert.frees) {
            if (fb.kind == FreeKind::eq_multiplier) {
                sys.free_terms.push_back(
                    {{{fb.clique, cert.constraints.at(fb.constraint) * one}}});
            } else {
                int l = fb.clique;
                if (l <= 0 || l >= p) throw Error("transfer clique index out of range");
                int s = cert.cd.parents[l];
                Polynomial own =
                    (sys.dens.theta[l] * sys.dens.d[l].exact_div(sys.dens.theta_hat[l]))
                        .pow(k);
                Polynomial par =
                    (sys.dens.theta[s] * sys.dens.d[s].exact_div(sys.dens.theta_hat[l]))
                        .pow(k);
                sys.free_terms.push_back({{{l, -own}, {s, par}}});
            }
        }
    }
    return sys;
}

// sigma = basis' G basis using the stored (possibly asymmetric) entries.
Polynomial gram_polynomial(const CertGram& g, int nvars, CoeffMode mode) {
    Polynomial sigma(nvars, mode);
    const int n = g.n();
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            const Coeff& v = g.entries[r * n + c];
            if (v.is_zero()) continue;
            sigma.add_term(g.basis[r] * g.basis[c], v);
        }
    return sigma;
}

struct ShapeBounds {
    int sigma0_deg;
    bool exact_degree; // Reznick bases
};

// Degree bound for a gram block under the certificate's mode parameters.
int gram_degree_bound(const SparseCertificate& cert, const DenominatorSet& dens,
                      const SparsePop& pop, const CertGram& g) {
    if (cert.mode == RelaxMode::homogeneous_reznick)
        return cert.d + cert.k * (1 + dens.phi[g.clique].degree() / 2);
    if (cert.mode == RelaxMode::dense_putinar)
        return g.constraint < 0 ? cert.k : cert.k - pop.u[g.constraint];
    int base = cert.d + cert.k * dens.omega[g.clique];
    return g.constraint < 0 ? base : base - pop.u[g.constraint];
}

void validate_shapes(const SparseCertificate& cert, const CertSystem& sys) {
    const int p = cert.cd.p();
    for (auto& g : cert.grams) {
        if (g.clique < 0 || g.clique >= p) throw Error("gram clique index out of range");
        if (static_cast<std::size_t>(g.n()) * g.n() != g.entries.size())
            throw Error("gram entry count does not match basis size");
        std::set<int> cset(cert.cd.cliques[g.clique].begin(),
                           cert.cd.cliques[g.clique].end());
        int bound = gram_degree_bound(cert, sys.dens, sys.pop, g);
        bool exact_deg = cert.mode == RelaxMode::homogeneous_reznick;
        for (auto& m : g.basis) {
            for (auto& [v, e] : m.exponents())
                if (!cset.count(v)) throw Error("gram basis leaves its clique");
            if (m.degree() > bound || (exact_deg && m.degree() != bound))
                throw Error("gram basis exceeds the degree bound");
        }
        for (auto& c : g.entries)
            if (c.mode() != cert.cmode) throw Error("gram entry mode mismatch");
    }
    for (auto& fb : cert.frees) {
        if (fb.kind == FreeKind::transfer) {
            if (fb.clique <= 0 || fb.clique >= p)
                throw Error("transfer clique index out of range");
            std::set<int> sset(cert.cd.separators[fb.clique].begin(),
                               cert.cd.separators[fb.clique].end());
            if (!fb.poly.is_zero() && !fb.poly.supported_in(sset))
                throw Error("transfer polynomial leaves its separator");
            if (fb.poly.degree() > 2 * (cert.d + cert.k))
                throw Error("transfer polynomial exceeds its degree bound");
        } else {
            if (fb.constraint < 0 ||
                fb.constraint >= static_cast<int>(cert.constraints.size()))
                throw Error("free multiplier references an unknown constraint");
            bool in_pair = false;
            for (auto& [a, b] : sys.pop.equality_pairs)
                if (a == fb.constraint || b == fb.constraint) in_pair = true;
            if (!in_pair)
                throw Error("free multiplier attached to a non-equality constraint");
        }
    }
}

struct AssembledResidual {
    std::vector<Polynomial> per_group;
    double max_abs = 0;
};

AssembledResidual assemble_residual(const SparseCertificate& cert, const CertSystem& sys) {
    const bool flt = cert.cmode == CoeffMode::floating;
    const int n = cert.nvars;
    auto conv = [&](const Polynomial& p) { return flt ? p.to_float() : p; };

    std::vector<Polynomial> acc;
    for (int q = 0; q < sys.ngroups; ++q)
        acc.push_back(conv(-sys.rhs[q]));

    for (std::size_t gi = 0; gi < cert.grams.size(); ++gi) {
        Polynomial sigma = gram_polynomial(cert.grams[gi], n, cert.cmode);
        for (auto& [q, mult] : sys.gram_terms[gi].mults)
            acc[q] = acc[q] + sigma * conv(mult);
    }
    for (std::size_t fi = 0; fi < cert.frees.size(); ++fi) {
        Polynomial poly = cert.frees[fi].poly;
        if (poly.mode() != cert.cmode)
            poly = flt ? poly.to_float() : poly.to_exact();
        for (auto& [q, mult] : sys.free_terms[fi].mults)
            acc[q] = acc[q] + poly * conv(mult);
    }
    AssembledResidual out;
    for (auto& r : acc) {
        for (auto& [m, c] : r.terms())
            out.max_abs = std::max(out.max_abs, std::fabs(c.to_double()));
        out.per_group.push_back(std::move(r));
    }
    return out;
}

} // namespace

SparseCertificate extract(const RelaxationProblem& rp, const SdpSolution& sol) {
    if (sol.status != SdpStatus::optimal)
        throw Error("cannot extract a certificate from a run with status " +
                    to_string(sol.status));
    SparseCertificate cert;
    cert.mode = rp.mode;
    cert.form = rp.form;
    cert.cmode = CoeffMode::floating;
    cert.nvars = rp.pop.nvars();
    cert.k = rp.k;
    cert.d = rp.d;
    cert.eps = rp.eps;
    cert.objective = rp.pop.f;
    cert.constraints = rp.pop.g;
    cert.cd = rp.pop.cd;
    if (rp.mode == RelaxMode::homogeneous_reznick) {
        cert.reznick_parts = rp.pop.objective_parts;
        cert.reznick_kl = rp.reznick_kl;
    }

    if (static_cast<int>(sol.X.size()) != static_cast<int>(rp.grams.size()))
        throw Error("solution block count does not match relaxation");
    for (std::size_t gi = 0; gi < rp.grams.size(); ++gi) {
        const auto& gb = rp.grams[gi];
        CertGram cg;
        cg.clique = gb.clique;
        cg.constraint = gb.constraint;
        cg.basis = gb.basis;
        int nb = cg.n();
        cg.entries.reserve(static_cast<std::size_t>(nb) * nb);
        const Eigen::MatrixXd& X = sol.X[gi];
        for (int r = 0; r < nb; ++r)
            for (int c = 0; c < nb; ++c)
                cg.entries.emplace_back(0.5 * (X(r, c) + X(c, r)));
        cert.grams.push_back(std::move(cg));
    }

    int slot = 0;
    for (auto& fb : rp.frees) {
        if (fb.kind == FreeKind::lambda) {
            cert.lambda = Coeff(sol.u.at(slot));
            ++slot;
            continue;
        }
        CertFree cf;
        cf.kind = fb.kind;
        cf.clique = fb.clique;
        cf.constraint = fb.constraint;
        Polynomial poly(cert.nvars, CoeffMode::floating);
        for (auto& m : fb.monos) poly.add_term(m, Coeff(sol.u.at(slot++)));
        cf.poly = poly;
        cert.frees.push_back(std::move(cf));
    }
    if (rp.lambda_fixed)
        cert.lambda = Coeff(rat_to_double(*rp.lambda_fixed));
    else if (!rp.has_lambda && rp.mode != RelaxMode::homogeneous_reznick &&
             rp.mode != RelaxMode::dense_putinar)
        cert.lambda = Coeff(0.0);
    return cert;
}

VerifyReport verify_float(const SparseCertificate& cert, double tol) {
    SparseCertificate c = cert;
    if (c.cmode != CoeffMode::floating) {
        // Exact certificates verify in float by conversion.
        c.cmode = CoeffMode::floating;
        for (auto& g : c.grams)
            for (auto& e : g.entries) e = Coeff(e.to_double());
        for (auto& fb : c.frees) fb.poly = fb.poly.to_float();
        if (c.lambda) c.lambda = Coeff(c.lambda->to_double());
    }
    CertSystem sys = build_cert_system(c);
    validate_shapes(c, sys);
    VerifyReport rep;
    std::ostringstream detail;

    bool symmetric = true;
    double min_eig = 0;
    bool have_eig = false;
    for (std::size_t gi = 0; gi < c.grams.size(); ++gi) {
        const auto& g = c.grams[gi];
        int nb = g.n();
        Eigen::MatrixXd G(nb, nb);
        for (int r = 0; r < nb; ++r)
            for (int cc = 0; cc < nb; ++cc) G(r, cc) = g.entries[r * nb + cc].to_double();
        if ((G - G.transpose()).cwiseAbs().maxCoeff() > 0) {
            symmetric = false;
            detail << "gram " << gi + 1 << " (clique " << g.clique + 1
                   << "): asymmetric entries\n";
        }
        if (nb > 0) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (G + G.transpose()),
                                                               Eigen::EigenvaluesOnly);
            double lmin = eig.eigenvalues().minCoeff();
            if (!have_eig || lmin < min_eig) min_eig = lmin;
            have_eig = true;
            if (lmin <= -tol)
                detail << "gram " << gi + 1 << " (clique " << g.clique + 1
                       << "): min eigenvalue " << lmin << "\n";
        }
    }

    AssembledResidual res = assemble_residual(c, sys);
    rep.max_residual = res.max_abs;
    rep.min_eigenvalue = have_eig ? min_eig : 0.0;
    for (int q = 0; q < sys.ngroups; ++q) {
        if (res.per_group[q].is_zero()) continue;
        double worst = 0;
        Monomial worst_m;
        for (auto& [m, cf] : res.per_group[q].terms())
            if (std::fabs(cf.to_double()) > worst) {
                worst = std::fabs(cf.to_double());
                worst_m = m;
            }
        if (worst >= tol)
            detail << "group " << q + 1 << ": residual " << worst << " at "
                   << worst_m.to_string() << "\n";
    }
    rep.pass = symmetric && rep.max_residual < tol && rep.min_eigenvalue > -tol;
    rep.detail = detail.str();
    return rep;
}

bool psd_exact(const std::vector<Rational>& dense, int n) {
    std::vector<Rational> a = dense;
    std::vector<bool> done(n, false);
    auto at = [&](int r, int c) -> Rational& { return a[r * n + c]; };
    for (int step = 0; step < n; ++step) {
        // Symmetric pivoting: the largest remaining diagonal entry.
        int piv = -1;
        for (int i = 0; i < n; ++i) {
            if (done[i]) continue;
            if (sgn(at(i, i)) > 0 && (piv < 0 || at(i, i) > at(piv, piv))) piv = i;
        }
        if (piv < 0) {
            // All remaining diagonals <= 0: PSD iff everything left is zero.
            for (int i = 0; i < n; ++i) {
                if (done[i]) continue;
                if (sgn(at(i, i)) != 0) return false;
                for (int j = 0; j < n; ++j)
                    if (!done[j] && sgn(at(i, j)) != 0) return false;
            }
            return true;
        }
        done[piv] = true;
        Rational d = at(piv, piv);
        for (int i = 0; i < n; ++i) {
            if (done[i]) continue;
            if (sgn(at(i, piv)) == 0) continue;
            Rational factor = at(i, piv) / d;
            for (int j = 0; j < n; ++j) {
                if (done[j]) continue;
                at(i, j) -= factor * at(piv, j);
            }
            at(i, piv) = 0;
        }
    }
    return true;
}

VerifyReport verify_exact(const SparseCertificate& cert) {
    if (cert.cmode != CoeffMode::exact)
        throw Error("verify_exact requires a certificate with rational entries");
    CertSystem sys = build_cert_system(cert);
    validate_shapes(cert, sys);
    VerifyReport rep;
    std::ostringstream detail;

    bool psd_all = true;
    bool symmetric = true;
    for (std::size_t gi = 0; gi < cert.grams.size(); ++gi) {
        const auto& g = cert.grams[gi];
        int nb = g.n();
        std::vector<Rational> dense(static_cast<std::size_t>(nb) * nb);
        bool sym = true;
        for (int r = 0; r < nb; ++r)
            for (int c = 0; c < nb; ++c) {
                dense[r * nb + c] = g.entries[r * nb + c].rat();
                if (c < r && dense[r * nb + c] != g.entries[c * nb + r].rat()) sym = false;
            }
        if (!sym) {
            symmetric = false;
            detail << "gram " << gi + 1 << ": asymmetric entries\n";
            continue;
        }
        if (!psd_exact(dense, nb)) {
            psd_all = false;
            detail << "gram " << gi + 1 << " (clique " << g.clique + 1
                   << "): not positive semidefinite\n";
        }
    }

    AssembledResidual res = assemble_residual(cert, sys);
    bool zero = true;
    rep.exact_residual = Polynomial::zero(cert.nvars);
    for (int q = 0; q < sys.ngroups; ++q) {
        if (res.per_group[q].is_zero()) continue;
        zero = false;
        if (rep.exact_residual.is_zero()) rep.exact_residual = res.per_group[q];
        detail << "group " << q + 1 << ": nonzero residual, leading monomial "
               << res.per_group[q].terms().rbegin()->first.to_string() << " ("
               << res.per_group[q].term_count() << " terms)\n";
    }
    rep.max_residual = res.max_abs;
    rep.min_eigenvalue = 0;
    rep.pass = symmetric && psd_all && zero;
    rep.detail = detail.str();
    return rep;
}

namespace {

struct RowKeyLess {
    bool operator()(const std::pair<int, Monomial>& a,
                    const std::pair<int, Monomial>& b) const {
        if (a.first != b.first) return a.first < b.first;
        return Monomial::grlex_less(a.second, b.second);
    }
};

// One projection variable: a Gram pair or a free-poly coefficient.
struct ProjVar {
    int gram = -1; // index into cert.grams, or -1 for a free coefficient
    int r = 0, c = 0;
    int free_block = -1;
    Monomial mono;
    Rational weight; // metric weight (2 for off-diagonal pairs, else 1)
    std::vector<std::pair<int, Rational>> rows; // (row index, coefficient)
};

} // namespace

RoundingResult round_to_rational(const SparseCertificate& cert, const Integer& max_den) {
    RoundingResult out;
    SparseCertificate c = cert;
    c.cmode = CoeffMode::exact;
    for (auto& g : c.grams) {
        for (int r = 0; r < g.n(); ++r)
            for (int cc = 0; cc < g.n(); ++cc) {
                // Round the symmetrized value so pairs stay equal.
                Rational sym = (coeff_to_rational(g.entries[r * g.n() + cc]) +
                                coeff_to_rational(g.entries[cc * g.n() + r])) /
                               2;
                if (cc >= r) {
                    Rational v = rat_best_approx(sym, max_den);
                    g.at(r, cc) = Coeff(v);
                    g.at(cc, r) = Coeff(v);
                }
            }
    }
    for (auto& fb : c.frees) fb.poly = fb.poly.round_coeffs(max_den);
    if (c.lambda) c.lambda = Coeff(rat_best_approx(coeff_to_rational(*c.lambda), max_den));

    CertSystem sys = build_cert_system(c);
    validate_shapes(c, sys);

    // Structural facial reduction. The prescribed full bases usually force
    // part of every Gram onto the PSD boundary: whenever a zero-rhs row of
    // the identity receives contributions only from same-sign diagonal
    // entries, those diagonals (hence their whole rows) are identically zero
    // in every certificate. Iterate to a fixpoint, then also freeze
    // diagonals whose value rounded to zero. Frozen rows leave the
    // projection, which keeps the exact PSD check satisfiable.
    std::vector<std::vector<bool>> frozen;
    for (auto& g : c.grams) frozen.emplace_back(g.n(), false);
    {
        struct RowInfo {
            std::vector<std::pair<int, int>> diag; // (gram, index) with +coeff sign
            std::vector<std::pair<int, int>> diag_neg;
            bool offdiag_or_free = false;
            bool rhs_zero = true;
        };
        std::map<std::pair<int, Monomial>, RowInfo, RowKeyLess> rows;
        auto row_of = [&](int q, const Monomial& m) -> RowInfo& { return rows[{q, m}]; };
        for (std::size_t gi = 0; gi < c.grams.size(); ++gi) {
            const auto& g = c.grams[gi];
            for (int r = 0; r < g.n(); ++r)
                for (int cc = r; cc < g.n(); ++cc) {
                    Monomial ab = g.basis[r] * g.basis[cc];
                    for (auto& [q, mult] : sys.gram_terms[gi].mults)
                        for (auto& [mc, co] : mult.terms()) {
                            RowInfo& ri = row_of(q, ab * mc);
                            if (r != cc) {
                                ri.offdiag_or_free = true;
                            } else if (sgn(co.rat()) > 0) {
                                ri.diag.emplace_back(static_cast<int>(gi), r);
                            } else {
                                ri.diag_neg.emplace_back(static_cast<int>(gi), r);
                            }
                        }
                }
        }
        for (std::size_t fi = 0; fi < c.frees.size(); ++fi) {
            // Free polynomials can hit any slot monomial of their role.
            const auto& fb = c.frees[fi];
            std::vector<Monomial> slots;
            if (fb.kind == FreeKind::transfer)
                slots = monomials_upto(c.cd.separators[fb.clique], 2 * (c.d + c.k));
            else {
                int bound = gram_degree_bound(c, sys.dens, sys.pop,
                                              CertGram{fb.clique, fb.constraint, {}, {}});
                slots = monomials_upto(c.cd.cliques[fb.clique], 2 * std::max(bound, 0));
            }
            for (auto& mono : slots)
                for (auto& [q, mult] : sys.free_terms[fi].mults)
                    for (auto& [mc, co] : mult.terms())
                        row_of(q, mono * mc).offdiag_or_free = true;
        }
        for (int q = 0; q < sys.ngroups; ++q)
            for (auto& [m, co] : sys.rhs[q].terms()) row_of(q, m).rhs_zero = co.is_zero();

        bool changed = true;
        while (changed) {
            changed = false;
            for (auto& [key, ri] : rows) {
                if (!ri.rhs_zero || ri.offdiag_or_free) continue;
                // Active contributors must be same-signed diagonals.
                std::vector<std::pair<int, int>> act_pos, act_neg;
                for (auto& [gi, r] : ri.diag)
                    if (!frozen[gi][r]) act_pos.emplace_back(gi, r);
                for (auto& [gi, r] : ri.diag_neg)
                    if (!frozen[gi][r]) act_neg.emplace_back(gi, r);
                if (act_pos.empty() || act_neg.empty()) {
                    for (auto& [gi, r] : act_pos) {
                        frozen[gi][r] = true;
                        changed = true;
                    }
                    for (auto& [gi, r] : act_neg) {
                        frozen[gi][r] = true;
                        changed = true;
                    }
                }
            }
            // Off-diagonal pairs between one frozen and one active row do not
            // block further deductions; rebuilding the offdiag flags with the
            // frozen set would go further, but iterating the diagonal rule is
            // enough for the bases at hand.
        }
    }
    for (std::size_t gi = 0; gi < c.grams.size(); ++gi) {
        auto& g = c.grams[gi];
        for (int r = 0; r < g.n(); ++r)
            if (g.at(r, r).is_zero()) frozen[gi][r] = true;
        for (int r = 0; r < g.n(); ++r)
            for (int cc = 0; cc < g.n(); ++cc)
                if (frozen[gi][r] || frozen[gi][cc]) g.at(r, cc) = Coeff(Rational(0));
    }

    // Row space and residual of the rounded certificate.
    AssembledResidual res = assemble_residual(c, sys);

    std::map<std::pair<int, Monomial>, int, RowKeyLess> rowmap;
    std::vector<ProjVar> vars;

    auto touch = [&](int q, const Monomial& m) {
        rowmap.emplace(std::make_pair(q, m), 0);
    };
    for (int q = 0; q < sys.ngroups; ++q) {
        for (auto& [m, co] : sys.rhs[q].terms()) touch(q, m);
        for (auto& [m, co] : res.per_group[q].terms()) touch(q, m);
    }
    for (std::size_t gi = 0; gi < c.grams.size(); ++gi) {
        const auto& g = c.grams[gi];
        for (int r = 0; r < g.n(); ++r)
            for (int cc = r; cc < g.n(); ++cc) {
                Monomial ab = g.basis[r] * g.basis[cc];
                for (auto& [q, mult] : sys.gram_terms[gi].mults)
                    for (auto& [mc, co] : mult.terms()) touch(q, ab * mc);
            }
    }
    for (std::size_t fi = 0; fi < c.frees.size(); ++fi) {
        // Correction slots: the full slot set for the block's role.
        const auto& fb = c.frees[fi];
        std::vector<Monomial> slots;
        if (fb.kind == FreeKind::transfer)
            slots = monomials_upto(c.cd.separators[fb.clique], 2 * (c.d + c.k));
        else {
            int bound = gram_degree_bound(c, sys.dens, sys.pop,
                                          CertGram{fb.clique, fb.constraint, {}, {}});
            slots = monomials_upto(c.cd.cliques[fb.clique], 2 * std::max(bound, 0));
        }
        for (auto& mono : slots)
            for (auto& [q, mult] : sys.free_terms[fi].mults)
                for (auto& [mc, co] : mult.terms()) touch(q, mono * mc);
    }

    int nrows = 0;
    for (auto& [key, v] : rowmap) v = nrows++;

    std::vector<Rational> r_vec(nrows, Rational(0));
    for (int q = 0; q < sys.ngroups; ++q)
        for (auto& [m, co] : res.per_group[q].terms())
            r_vec[rowmap.at({q, m})] = -co.rat(); // corrections must cancel the residual

    // Build variables with their row coefficients.
    for (std::size_t gi = 0; gi < c.grams.size(); ++gi) {
        const auto& g = c.grams[gi];
        for (int r = 0; r < g.n(); ++r)
            for (int cc = r; cc < g.n(); ++cc) {
                if (frozen[gi][r] || frozen[gi][cc]) continue;
                ProjVar v;
                v.gram = static_cast<int>(gi);
                v.r = r;
                v.c = cc;
                v.weight = (r == cc) ? 1 : 2;
                Monomial ab = g.basis[r] * g.basis[cc];
                Rational scale = (r == cc) ? 1 : 2; // both symmetric entries move
                for (auto& [q, mult] : sys.gram_terms[gi].mults)
                    for (auto& [mc, co] : mult.terms())
                        v.rows.emplace_back(rowmap.at({q, ab * mc}),
                                            Rational(scale * co.rat()));
                vars.push_back(std::move(v));
            }
    }
    for (std::size_t fi = 0; fi < c.frees.size(); ++fi) {
        const auto& fb = c.frees[fi];
        std::vector<Monomial> slots;
        if (fb.kind == FreeKind::transfer)
            slots = monomials_upto(c.cd.separators[fb.clique], 2 * (c.d + c.k));
        else {
            int bound = gram_degree_bound(c, sys.dens, sys.pop,
                                          CertGram{fb.clique, fb.constraint, {}, {}});
            slots = monomials_upto(c.cd.cliques[fb.clique], 2 * std::max(bound, 0));
        }
        for (auto& mono : slots) {
            ProjVar v;
            v.free_block = static_cast<int>(fi);
            v.mono = mono;
            v.weight = 1;
            for (auto& [q, mult] : sys.free_terms[fi].mults)
                for (auto& [mc, co] : mult.terms())
                    v.rows.emplace_back(rowmap.at({q, mono * mc}), co.rat());
            vars.push_back(std::move(v));
        }
    }

    // Merge duplicate row hits inside one variable.
    for (auto& v : vars) {
        std::sort(v.rows.begin(), v.rows.end(),
                  [](auto& a, auto& b) { return a.first < b.first; });
        std::vector<std::pair<int, Rational>> merged;
        for (auto& [row, co] : v.rows) {
            if (!merged.empty() && merged.back().first == row)
                merged.back().second += co;
            else
                merged.emplace_back(row, co);
        }
        std::erase_if(merged, [](auto& e) { return sgn(e.second) == 0; });
        v.rows = std::move(merged);
    }

    bool any_residual = false;
    for (auto& rr : r_vec)
        if (sgn(rr) != 0) any_residual = true;

    if (any_residual) {
        // Normal equations M nu = r with M = sum_v (1/w_v) a_v a_v'; variables
        // touching a single row feed a diagonal D, the rest couple via a
        // low-rank term handled by the Woodbury identity.
        std::vector<Rational> diag(nrows, Rational(0));
        std::vector<int> coupled;
        for (std::size_t vi = 0; vi < vars.size(); ++vi) {
            const auto& v = vars[vi];
            if (v.rows.empty()) continue;
            if (v.rows.size() == 1)
                diag[v.rows[0].first] += v.rows[0].second * v.rows[0].second / v.weight;
            else
                coupled.push_back(static_cast<int>(vi));
        }
        const int t = static_cast<int>(coupled.size());
        if (t > 4000) {
            out.failure = "projection system too large for exact arithmetic (" +
                          std::to_string(t) + " coupled variables)";
            return out;
        }
        for (int row = 0; row < nrows; ++row) {
            if (sgn(diag[row]) != 0) continue;
            bool touched = sgn(r_vec[row]) != 0;
            for (int vi : coupled)
                for (auto& [rr, co] : vars[vi].rows)
                    if (rr == row) touched = true;
            if (touched && sgn(r_vec[row]) != 0) {
                bool coverable = false;
                for (int vi : coupled)
                    for (auto& [rr, co] : vars[vi].rows)
                        if (rr == row) coverable = true;
                if (!coverable) {
                    out.failure = "identity residual on a monomial no variable reaches";
                    return out;
                }
            }
        }

        // nu = Dinv r - Dinv T (W + T' Dinv T)^{-1} T' Dinv r, where columns of
        // T are the coupled variables' row vectors scaled by 1/w.
        // Rows with zero diagonal are handled by restricting to rows where
        // diag > 0 plus treating zero-diag rows inside the small dense system.
        std::vector<int> zrows;
        for (int row = 0; row < nrows; ++row)
            if (sgn(diag[row]) == 0) zrows.push_back(row);
        // Small dense system over [coupled variables' nu-interactions +
        // zero-diagonal rows] — assembled as bordered system:
        //   [Dz  Tz; Tz' ...] — for simplicity fall back to a dense solve on
        // the full M when zero-diagonal rows interact with residual rows.
        bool need_dense = false;
        for (int row : zrows)
            if (sgn(r_vec[row]) != 0) need_dense = true;
        if (!zrows.empty()) {
            for (int vi : coupled)
                for (auto& [rr, co] : vars[vi].rows)
                    for (int row : zrows)
                        if (rr == row) need_dense = true;
        }

        std::vector<Rational> nu(nrows, Rational(0));
        if (!need_dense) {
            std::vector<Rational> dinv_r(nrows, Rational(0));
            for (int row = 0; row < nrows; ++row)
                if (sgn(diag[row]) != 0) dinv_r[row] = r_vec[row] / diag[row];
            // S = W + T' Dinv T (t x t), rhs_s = T' Dinv r.
            std::vector<Rational> S(static_cast<std::size_t>(t) * t, Rational(0));
            std::vector<Rational> rhs_s(t, Rational(0));
            for (int a = 0; a < t; ++a) {
                const auto& va = vars[coupled[a]];
                S[a * t + a] += va.weight;
                for (auto& [row, co] : va.rows) rhs_s[a] += co * dinv_r[row];
                for (int b2 = a; b2 < t; ++b2) {
                    const auto& vb = vars[coupled[b2]];
                    Rational acc(0);
                    auto ia = va.rows.begin();
                    auto ib = vb.rows.begin();
                    while (ia != va.rows.end() && ib != vb.rows.end()) {
                        if (ia->first < ib->first)
                            ++ia;
                        else if (ib->first < ia->first)
                            ++ib;
                        else {
                            if (sgn(diag[ia->first]) != 0)
                                acc += ia->second * ib->second / diag[ia->first];
                            ++ia;
                            ++ib;
                        }
                    }
                    S[a * t + b2] += acc;
                    if (b2 != a) S[b2 * t + a] += acc;
                }
            }
            // Exact Gaussian elimination with partial pivoting.
            std::vector<Rational> x(t, Rational(0));
            {
                std::vector<int> perm(t);
                for (int i = 0; i < t; ++i) perm[i] = i;
                for (int col = 0; col < t; ++col) {
                    int piv = -1;
                    for (int row = col; row < t; ++row)
                        if (sgn(S[perm[row] * t + col]) != 0) {
                            piv = row;
                            break;
                        }
                    if (piv < 0) {
                        if (sgn(rhs_s[perm[col]]) != 0) {
                            out.failure = "projection normal equations are singular";
                            return out;
                        }
                        continue;
                    }
                    std::swap(perm[col], perm[piv]);
                    Rational pd = S[perm[col] * t + col];
                    for (int row = col + 1; row < t; ++row) {
                        Rational f = S[perm[row] * t + col] / pd;
                        if (sgn(f) == 0) continue;
                        for (int cc = col; cc < t; ++cc)
                            S[perm[row] * t + cc] -= f * S[perm[col] * t + cc];
                        rhs_s[perm[row]] -= f * rhs_s[perm[col]];
                    }
                }
                for (int col = t - 1; col >= 0; --col) {
                    Rational pd = S[perm[col] * t + col];
                    if (sgn(pd) == 0) continue;
                    Rational acc = rhs_s[perm[col]];
                    for (int cc = col + 1; cc < t; ++cc)
                        acc -= S[perm[col] * t + cc] * x[cc];
                    x[col] = acc / pd;
                }
            }
            // nu = Dinv (r - T x)
            std::vector<Rational> t_x(nrows, Rational(0));
            for (int a = 0; a < t; ++a)
                for (auto& [row, co] : vars[coupled[a]].rows) t_x[row] += co * x[a];
            for (int row = 0; row < nrows; ++row)
                if (sgn(diag[row]) != 0) nu[row] = (r_vec[row] - t_x[row]) / diag[row];
        } else {
            if (nrows > 600) {
                out.failure = "projection system too large for exact arithmetic (" +
                              std::to_string(nrows) + " dense rows)";
                return out;
            }
            // Dense M = A W^{-1} A'.
            std::vector<Rational> M(static_cast<std::size_t>(nrows) * nrows, Rational(0));
            for (auto& v : vars)
                for (auto& [ra, ca] : v.rows)
                    for (auto& [rb, cb] : v.rows) M[ra * nrows + rb] += ca * cb / v.weight;
            std::vector<Rational> rr = r_vec;
            std::vector<int> perm(nrows);
            for (int i = 0; i < nrows; ++i) perm[i] = i;
            for (int col = 0; col < nrows; ++col) {
                int piv = -1;
                for (int row = col; row < nrows; ++row)
                    if (sgn(M[perm[row] * nrows + col]) != 0) {
                        piv = row;
                        break;
                    }
                if (piv < 0) {
                    if (sgn(rr[perm[col]]) != 0) {
                        out.failure = "projection normal equations are singular";
                        return out;
                    }
                    continue;
                }
                std::swap(perm[col], perm[piv]);
                Rational pd = M[perm[col] * nrows + col];
                for (int row = col + 1; row < nrows; ++row) {
                    Rational f = M[perm[row] * nrows + col] / pd;
                    if (sgn(f) == 0) continue;
                    for (int cc = col; cc < nrows; ++cc)
                        M[perm[row] * nrows + cc] -= f * M[perm[col] * nrows + cc];
                    rr[perm[row]] -= f * rr[perm[col]];
                }
            }
            for (int col = nrows - 1; col >= 0; --col) {
                Rational pd = M[perm[col] * nrows + col];
                if (sgn(pd) == 0) continue;
                Rational acc = rr[perm[col]];
                for (int cc = col + 1; cc < nrows; ++cc)
                    acc -= M[perm[col] * nrows + cc] * nu[cc];
                nu[col] = acc / pd;
            }
        }

        // x_v = (1/w_v) a_v' nu applied back into the certificate.
        for (auto& v : vars) {
            Rational corr(0);
            for (auto& [row, co] : v.rows) corr += co * nu[row];
            corr /= v.weight;
            if (sgn(corr) == 0) continue;
            if (v.gram >= 0) {
                auto& g = c.grams[v.gram];
                g.at(v.r, v.c) = Coeff(Rational(g.at(v.r, v.c).rat() + corr));
                if (v.r != v.c) g.at(v.c, v.r) = g.at(v.r, v.c);
            } else {
                auto& fb = c.frees[v.free_block];
                Polynomial delta = Polynomial::term(c.nvars, v.mono, Coeff(corr));
                fb.poly = (fb.poly.mode() == CoeffMode::exact ? fb.poly : fb.poly.to_exact()) + delta;
            }
        }
    }

    VerifyReport check = verify_exact(c);
    if (!check.exact_residual.is_zero()) {
        out.failure = "projection failed to close the identity";
        return out;
    }
    if (!check.pass) {
        std::ostringstream msg;
        msg << "projection left a Gram block indefinite: " << check.detail;
        for (auto& g : c.grams) {
            int nn = g.n();
            Eigen::MatrixXd G(nn, nn);
            for (int r = 0; r < nn; ++r)
                for (int cc = 0; cc < nn; ++cc) G(r, cc) = g.at(r, cc).to_double();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G, Eigen::EigenvaluesOnly);
            msg << " [mineig " << eig.eigenvalues().minCoeff() << "]";
        }
        out.failure = msg.str();
        return out;
    }
    out.ok = true;
    out.cert = std::move(c);
    return out;
}

namespace {

std::string poly_text(const Polynomial& p) { return p.to_string(); }

Coeff parse_value(const std::string& tok, CoeffMode mode, int line) {
    try {
        if (mode == CoeffMode::exact) return Coeff(rat_parse(tok));
        return Coeff(std::stod(tok));
    } catch (const std::exception&) {
        throw ParseError("malformed number '" + tok + "'", line);
    }
}

} // namespace

std::string certificate_text(const SparseCertificate& cert) {
    std::ostringstream os;
    os << "sparse-reznick-cert v1\n";
    os << "mode " << to_string(cert.mode) << "\n";
    os << "formulation " << to_string(cert.form) << "\n";
    os << "coeffs " << to_string(cert.cmode) << "\n";
    os << "nvars " << cert.nvars << "\n";
    os << "k " << cert.k << "\n";
    os << "d " << cert.d << "\n";
    os << "epsilon " << rat_to_string(cert.eps) << "\n";
    if (cert.lambda)
        os << "lambda " << cert.lambda->to_string() << "\n";
    else
        os << "lambda none\n";
    os << "objective " << poly_text(cert.objective) << "\n";
    for (auto& g : cert.constraints) os << "constraint " << poly_text(g) << "\n";
    os << "cliques " << cert.cd.p() << "\n";
    for (auto& cl : cert.cd.cliques) {
        os << "clique";
        for (int v : cl) os << " " << v + 1;
        os << "\n";
    }
    os << "parents";
    for (int s : cert.cd.parents) os << " " << s + 1;
    os << "\n";
    if (cert.mode == RelaxMode::homogeneous_reznick) {
        os << "kl";
        for (int kl : cert.reznick_kl) os << " " << kl;
        os << "\n";
        for (std::size_t l = 0; l < cert.reznick_parts.size(); ++l)
            os << "part " << l + 1 << " " << poly_text(cert.reznick_parts[l]) << "\n";
    }
    for (auto& g : cert.grams) {
        os << "gram " << g.clique + 1 << " " << g.constraint + 1 << " " << g.n() << "\n";
        os << "basis";
        for (auto& m : g.basis) os << " " << m.to_string();
        os << "\n";
        for (int r = 0; r < g.n(); ++r) {
            os << "row";
            for (int c = 0; c < g.n(); ++c) os << " " << g.entries[r * g.n() + c].to_string();
            os << "\n";
        }
    }
    for (auto& fb : cert.frees) {
        if (fb.kind == FreeKind::transfer)
            os << "psi " << fb.clique + 1 << " " << poly_text(fb.poly) << "\n";
        else
            os << "eqmult " << fb.clique + 1 << " " << fb.constraint + 1 << " "
               << poly_text(fb.poly) << "\n";
    }
    os << "end\n";
    return os.str();
}

void write_certificate(const SparseCertificate& cert, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << certificate_text(cert);
    if (!out) throw Error("write failure on '" + path + "'");
}

SparseCertificate read_certificate(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    return parse_certificate(in);
}

SparseCertificate parse_certificate(std::istream& in) {
    SparseCertificate cert;
    std::string line;
    int lineno = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            return true;
        }
        return false;
    };
    if (!next_line() || line != "sparse-reznick-cert v1")
        throw ParseError("missing certificate header 'sparse-reznick-cert v1'", lineno);

    bool have_nvars = false;
    int pending_cliques = 0;
    std::vector<std::vector<int>> cliques;
    std::vector<int> parents;
    bool seen_end = false;

    auto rest_of = [&](std::istringstream& ls) {
        std::string rest;
        std::getline(ls, rest);
        return rest;
    };

    while (next_line()) {
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "end") {
            seen_end = true;
            break;
        } else if (key == "mode") {
            std::string v;
            ls >> v;
            cert.mode = relax_mode_from_string(v);
        } else if (key == "formulation") {
            std::string v;
            ls >> v;
            cert.form = formulation_from_string(v);
        } else if (key == "coeffs") {
            std::string v;
            ls >> v;
            if (v == "exact")
                cert.cmode = CoeffMode::exact;
            else if (v == "float")
                cert.cmode = CoeffMode::floating;
            else
                throw ParseError("unknown coefficient mode '" + v + "'", lineno);
        } else if (key == "nvars") {
            ls >> cert.nvars;
            have_nvars = true;
        } else if (key == "k") {
            ls >> cert.k;
        } else if (key == "d") {
            ls >> cert.d;
        } else if (key == "epsilon") {
            std::string v;
            ls >> v;
            cert.eps = rat_parse(v);
        } else if (key == "lambda") {
            std::string v;
            ls >> v;
            if (v != "none") cert.lambda = parse_value(v, cert.cmode, lineno);
        } else if (key == "objective") {
            if (!have_nvars) throw ParseError("nvars must precede polynomials", lineno);
            cert.objective = Polynomial::parse(rest_of(ls), cert.nvars);
        } else if (key == "constraint") {
            cert.constraints.push_back(Polynomial::parse(rest_of(ls), cert.nvars));
        } else if (key == "cliques") {
            ls >> pending_cliques;
        } else if (key == "clique") {
            std::vector<int> cl;
            int v;
            while (ls >> v) cl.push_back(v - 1);
            cliques.push_back(cl);
        } else if (key == "parents") {
            int v;
            while (ls >> v) parents.push_back(v - 1);
        } else if (key == "kl") {
            int v;
            while (ls >> v) cert.reznick_kl.push_back(v);
        } else if (key == "part") {
            int idx;
            ls >> idx;
            cert.reznick_parts.push_back(Polynomial::parse(rest_of(ls), cert.nvars));
        } else if (key == "gram") {
            CertGram g;
            int cl, con, size;
            if (!(ls >> cl >> con >> size)) throw ParseError("malformed gram header", lineno);
            g.clique = cl - 1;
            g.constraint = con - 1;
            if (!next_line()) throw ParseError("missing gram basis", lineno);
            std::istringstream bs(line);
            std::string bkey;
            bs >> bkey;
            if (bkey != "basis") throw ParseError("expected 'basis'", lineno);
            std::string tok;
            while (bs >> tok) {
                Polynomial pm = Polynomial::parse(tok, cert.nvars);
                if (pm.term_count() != 1 || !(pm.terms().begin()->second == Coeff(Rational(1))))
                    throw ParseError("invalid basis monomial '" + tok + "'", lineno);
                g.basis.push_back(pm.terms().begin()->first);
            }
            if (static_cast<int>(g.basis.size()) != size)
                throw ParseError("basis length does not match declared size", lineno);
            g.entries.reserve(static_cast<std::size_t>(size) * size);
            for (int r = 0; r < size; ++r) {
                if (!next_line()) throw ParseError("missing gram row", lineno);
                std::istringstream rs(line);
                std::string rkey;
                rs >> rkey;
                if (rkey != "row") throw ParseError("expected 'row'", lineno);
                for (int cc = 0; cc < size; ++cc) {
                    if (!(rs >> tok))
                        throw ParseError("gram row has too few entries", lineno);
                    g.entries.push_back(parse_value(tok, cert.cmode, lineno));
                }
                if (rs >> tok) throw ParseError("gram row has too many entries", lineno);
            }
            cert.grams.push_back(std::move(g));
        } else if (key == "psi") {
            CertFree fb;
            fb.kind = FreeKind::transfer;
            int cl;
            ls >> cl;
            fb.clique = cl - 1;
            fb.poly = Polynomial::parse(rest_of(ls), cert.nvars,
                                        cert.cmode);
            cert.frees.push_back(std::move(fb));
        } else if (key == "eqmult") {
            CertFree fb;
            fb.kind = FreeKind::eq_multiplier;
            int cl, con;
            ls >> cl >> con;
            fb.clique = cl - 1;
            fb.constraint = con - 1;
            fb.poly = Polynomial::parse(rest_of(ls), cert.nvars, cert.cmode);
            cert.frees.push_back(std::move(fb));
        } else {
            throw ParseError("unknown field '" + key + "'", lineno);
        }
    }
    if (!seen_end) throw ParseError("missing 'end' marker", lineno);
    if (static_cast<int>(cliques.size()) != pending_cliques)
        throw ParseError("clique count does not match declaration", lineno);
    if (parents.empty() && !cliques.empty()) {
        cert.cd = make_decomposition(cert.nvars, cliques);
    } else {
        cert.cd = make_decomposition(cert.nvars, cliques, &parents);
    }
    return cert;
}

} // namespace sparsos
