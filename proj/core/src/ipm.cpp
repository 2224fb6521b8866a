#include "sparsos/sdp.hpp"
#include "sparsos/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <cstdio>
#include <cstdlib>

namespace sparsos {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Blocks {
    std::vector<MatrixXd> mats;
    Blocks() = default;
    explicit Blocks(const std::vector<int>& sizes) {
        for (int s : sizes) mats.emplace_back(MatrixXd::Zero(s, s));
    }
    Blocks& operator+=(const Blocks& o) {
        for (std::size_t b = 0; b < mats.size(); ++b) mats[b] += o.mats[b];
        return *this;
    }
    void scale_add(double a, const Blocks& o) {
        for (std::size_t b = 0; b < mats.size(); ++b) mats[b] += a * o.mats[b];
    }
};

double inner(const Blocks& a, const Blocks& b) {
    double acc = 0;
    for (std::size_t i = 0; i < a.mats.size(); ++i)
        acc += (a.mats[i].array() * b.mats[i].array()).sum();
    return acc;
}

// <A_i, X> with the entry list storing each unordered pair once.
double apply_row(const SdpInstance::Constraint& con, const Blocks& X,
                 const std::vector<double>& u) {
    double acc = 0;
    for (auto& e : con.psd)
        acc += e.value * X.mats[e.block](e.row, e.col) * (e.row == e.col ? 1.0 : 2.0);
    for (auto& [idx, v] : con.free_terms) acc += v * u[idx];
    return acc;
}

void add_entries(Blocks& M, const std::vector<SdpInstance::Entry>& es, double scale) {
    for (auto& e : es) {
        M.mats[e.block](e.row, e.col) += scale * e.value;
        if (e.row != e.col) M.mats[e.block](e.col, e.row) += scale * e.value;
    }
}

// Largest step alpha in [0, cap] keeping X + alpha*D positive definite,
// via the minimum eigenvalue of L^{-1} D L^{-T}.
double max_step(const Blocks& X, const Blocks& D, double cap) {
    double alpha = cap;
    for (std::size_t b = 0; b < X.mats.size(); ++b) {
        const MatrixXd& Xb = X.mats[b];
        Eigen::LLT<MatrixXd> llt(Xb);
        if (llt.info() != Eigen::Success) return 0.0;
        MatrixXd L = llt.matrixL();
        MatrixXd S = L.triangularView<Eigen::Lower>().solve(D.mats[b]);
        MatrixXd T = L.triangularView<Eigen::Lower>().solve(S.transpose());
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (T + T.transpose()),
                                                    Eigen::EigenvaluesOnly);
        double lmin = eig.eigenvalues().minCoeff();
        if (lmin < 0) alpha = std::min(alpha, -1.0 / lmin);
    }
    return alpha;
}

// Smallest eigenvalue of X Z (similar to the symmetric L' Z L for X = L L').
double min_eig_xz(const Blocks& X, const Blocks& Z) {
    double lmin = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < X.mats.size(); ++b) {
        Eigen::LLT<MatrixXd> llt(X.mats[b]);
        if (llt.info() != Eigen::Success) return -1.0;
        MatrixXd L = llt.matrixL();
        MatrixXd S = L.transpose() * Z.mats[b] * L;
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (S + S.transpose()),
                                                    Eigen::EigenvaluesOnly);
        lmin = std::min(lmin, eig.eigenvalues().minCoeff());
    }
    return lmin;
}

struct NtScaling {
    std::vector<MatrixXd> W;    // scaling point, W Z W = X
    std::vector<MatrixXd> Zinv; // Z^{-1}
};

NtScaling nt_scaling(const Blocks& X, const Blocks& Z) {
    NtScaling nt;
    for (std::size_t b = 0; b < X.mats.size(); ++b) {
        Eigen::LLT<MatrixXd> lltx(X.mats[b]), lltz(Z.mats[b]);
        if (lltx.info() != Eigen::Success || lltz.info() != Eigen::Success)
            throw Error("interior-point iterate lost positive definiteness");
        MatrixXd Lx = lltx.matrixL();
        MatrixXd Lz = lltz.matrixL();
        Eigen::JacobiSVD<MatrixXd> svd(Lz.transpose() * Lx,
                                       Eigen::ComputeFullU | Eigen::ComputeFullV);
        VectorXd sv = svd.singularValues();
        VectorXd isqrt = sv.array().sqrt().inverse();
        MatrixXd G = Lx * svd.matrixV() * isqrt.asDiagonal();
        nt.W.push_back(G * G.transpose());
        int n = X.mats[b].rows();
        nt.Zinv.push_back(lltz.solve(MatrixXd::Identity(n, n)));
    }
    return nt;
}

// W A W for a sparse symmetric A given by an entry list.
MatrixXd sandwich(const MatrixXd& W, const std::vector<SdpInstance::Entry>& es, int block) {
    MatrixXd V = MatrixXd::Zero(W.rows(), W.cols());
    for (auto& e : es) {
        if (e.block != block) continue;
        V.noalias() += e.value * (W.col(e.row) * W.row(e.col));
        if (e.row != e.col) V.noalias() += e.value * (W.col(e.col) * W.row(e.row));
    }
    return V;
}

struct Residual3 {
    double rp, rd, rg;
    double worst() const { return std::max({rp, rd, rg}); }
};

} // namespace

namespace {

SdpSolution solve_core(const SdpInstance& inst, const SolveOptions& opts) {
    inst.validate();
    const int m = inst.m();
    const int nb = inst.nblocks();
    const int nf = inst.nfree;
    const int ntot = std::max(1, inst.total_psd_dim());

    SdpSolution sol;
    sol.X.assign(nb, MatrixXd());
    sol.Z.assign(nb, MatrixXd());
    if (m == 0) {
        // No constraints: X = 0 (degenerate but consistent), y empty.
        for (int b = 0; b < nb; ++b) {
            sol.X[b] = MatrixXd::Zero(inst.block_sizes[b], inst.block_sizes[b]);
            sol.Z[b] = MatrixXd::Zero(inst.block_sizes[b], inst.block_sizes[b]);
        }
        sol.u.assign(nf, 0.0);
        sol.status = SdpStatus::optimal;
        return sol;
    }

    // Norms used for the starting point and relative residuals.
    double bnorm = 0, cnorm = 0;
    for (double v : inst.b) bnorm = std::max(bnorm, std::fabs(v));
    for (auto& e : inst.c_psd) cnorm = std::max(cnorm, std::fabs(e.value));
    for (double v : inst.c_free) cnorm = std::max(cnorm, std::fabs(v));

    std::vector<double> arow_norm(m, 0.0);
    for (int i = 0; i < m; ++i) {
        double s2 = 0;
        for (auto& e : inst.constraints[i].psd)
            s2 += e.value * e.value * (e.row == e.col ? 1.0 : 2.0);
        for (auto& [idx, v] : inst.constraints[i].free_terms) s2 += v * v;
        arow_norm[i] = std::sqrt(s2);
    }

    Blocks X(inst.block_sizes), Z(inst.block_sizes);
    double xscale = 10.0, zscale = 10.0;
    for (int i = 0; i < m; ++i)
        xscale = std::max(xscale, (1.0 + std::fabs(inst.b[i])) / (1.0 + arow_norm[i]));
    xscale = std::max(xscale, std::sqrt(static_cast<double>(ntot)));
    for (int i = 0; i < m; ++i) zscale = std::max(zscale, arow_norm[i]);
    zscale = std::max(zscale, 1.0 + cnorm);
    for (int b = 0; b < nb; ++b) {
        int s = inst.block_sizes[b];
        X.mats[b] = xscale * MatrixXd::Identity(s, s);
        Z.mats[b] = zscale * MatrixXd::Identity(s, s);
    }
    VectorXd y = VectorXd::Zero(m);
    VectorXd u = VectorXd::Zero(nf);
    const double mu0 = xscale * zscale;

    Blocks C(inst.block_sizes);
    add_entries(C, inst.c_psd, 1.0);
    bool zero_objective = inst.c_psd.empty();
    for (double v : inst.c_free)
        if (v != 0.0) zero_objective = false;

    auto compute_residual = [&](const Blocks& Xc, const VectorXd& uc, const VectorXd& yc,
                                const Blocks& Zc, VectorXd& rp, Blocks& Rd, VectorXd& rf,
                                double& pobj, double& dobj) -> Residual3 {
        std::vector<double> uv(uc.data(), uc.data() + uc.size());
        rp.resize(m);
        for (int i = 0; i < m; ++i)
            rp(i) = inst.b[i] - apply_row(inst.constraints[i], Xc, uv);
        // Rd = C + Z - A*(y): want zero.
        Rd = Blocks(inst.block_sizes);
        Rd += C;
        Rd += Zc;
        for (int i = 0; i < m; ++i) add_entries(Rd, inst.constraints[i].psd, -yc(i));
        rf.resize(nf);
        for (int j = 0; j < nf; ++j) rf(j) = inst.c_free[j];
        for (int i = 0; i < m; ++i)
            for (auto& [idx, v] : inst.constraints[i].free_terms) rf(idx) -= v * yc(i);
        pobj = inner(C, Xc);
        for (int j = 0; j < nf; ++j) pobj += inst.c_free[j] * uc(j);
        dobj = inst.b.empty() ? 0.0
                              : std::inner_product(inst.b.begin(), inst.b.end(), yc.data(), 0.0);
        Residual3 r;
        r.rp = rp.size() ? rp.cwiseAbs().maxCoeff() / (1.0 + bnorm) : 0.0;
        double rdmax = 0;
        for (auto& Mb : Rd.mats)
            if (Mb.size()) rdmax = std::max(rdmax, Mb.cwiseAbs().maxCoeff());
        if (nf) rdmax = std::max(rdmax, rf.cwiseAbs().maxCoeff());
        r.rd = rdmax / (1.0 + cnorm);
        r.rg = std::fabs(pobj - dobj) / (1.0 + std::fabs(pobj) + std::fabs(dobj));
        return r;
    };

    auto finalize = [&](SdpStatus st, int iters) {
        sol.status = st;
        sol.iterations = iters;
        for (int b = 0; b < nb; ++b) {
            sol.X[b] = X.mats[b];
            sol.Z[b] = Z.mats[b];
        }
        sol.y.assign(y.data(), y.data() + m);
        sol.u.assign(u.data(), u.data() + nf);
        Residuals r = residuals(inst, sol);
        sol.primal_res = r.primal;
        sol.dual_res = r.dual;
        sol.gap = r.gap;
        sol.primal_obj = inner(C, X);
        for (int j = 0; j < nf; ++j) sol.primal_obj += inst.c_free[j] * u(j);
        sol.dual_obj = 0;
        for (int i = 0; i < m; ++i) sol.dual_obj += inst.b[i] * y(i);
        return sol;
    };

    VectorXd rp;
    Blocks Rd;
    VectorXd rf;
    double pobj = 0, dobj = 0;

    // Best iterate seen, returned on failure to converge.
    Blocks bestX = X, bestZ = Z;
    VectorXd besty = y, bestu = u;
    double best_worst = std::numeric_limits<double>::infinity();
    auto finalize_best = [&](SdpStatus st, int iters) {
        if (best_worst < std::numeric_limits<double>::infinity()) {
            X = bestX;
            Z = bestZ;
            y = besty;
            u = bestu;
        }
        return finalize(st, iters);
    };

    double last_sp = 1.0, last_sd = 1.0;
    int stalled = 0;
    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        Residual3 res = compute_residual(X, u, y, Z, rp, Rd, rf, pobj, dobj);
        double mu = inner(X, Z) / ntot;
        if (opts.trace)
            std::fprintf(stderr,
                         "it %3d mu=%9.2e rp=%9.2e rd=%9.2e rg=%9.2e sp=%5.3f sd=%5.3f "
                         "pobj=%+.9e dobj=%+.9e\n",
                         iter, mu, res.rp, res.rd, res.rg, last_sp, last_sd, pobj, dobj);
        if (opts.trace)
            std::fprintf(stderr, "      ynorm=%9.2e\n", m ? y.cwiseAbs().maxCoeff() : 0.0);
        if (res.worst() < 0.99 * best_worst) {
            stalled = 0;
        } else if (++stalled >= 12) {
            return finalize_best(SdpStatus::max_iter, iter - 1);
        }
        if (res.worst() < best_worst) {
            best_worst = res.worst();
            bestX = X;
            bestZ = Z;
            besty = y;
            bestu = u;
        }
        // Pure feasibility: the gap is owned by the exact zero dual applied
        // afterwards, so only the feasibility residuals gate convergence.
        double stop_measure = zero_objective ? std::max(res.rp, res.rd) : res.worst();
        if (stop_measure < opts.tol) return finalize(SdpStatus::optimal, iter - 1);

        // Ray-based status heuristics (threshold per documented policy).
        double ynorm = m ? y.cwiseAbs().maxCoeff() : 0.0;
        double xnorm = 0;
        for (auto& Mb : X.mats) xnorm = std::max(xnorm, Mb.cwiseAbs().maxCoeff());
        if (ynorm > opts.ray_threshold && dobj < -1e3 * (1.0 + std::fabs(pobj)) &&
            res.rd < 1e-4)
            return finalize(SdpStatus::infeasible, iter - 1);
        if (xnorm > opts.ray_threshold && pobj > 1e3 * (1.0 + std::fabs(dobj)) &&
            res.rp < 1e-4)
            return finalize(SdpStatus::unbounded, iter - 1);
        if (ynorm > 1e4 * opts.ray_threshold || xnorm > 1e4 * opts.ray_threshold)
            return finalize_best(SdpStatus::max_iter, iter - 1);

        NtScaling nt;
        try {
            nt = nt_scaling(X, Z);
        } catch (const Error&) {
            return finalize_best(SdpStatus::max_iter, iter - 1);
        }

        // Schur complement M_ij = sum_b <A_i, W A_j W>, symmetric positive
        // definite; filled column by column.
        MatrixXd M = MatrixXd::Zero(m, m);
        MatrixXd F = MatrixXd::Zero(m, nf);
        for (int i = 0; i < m; ++i)
            for (auto& [idx, v] : inst.constraints[i].free_terms) F(i, idx) = v;
        {
            Blocks V(inst.block_sizes);
            for (int j = 0; j < m; ++j) {
                for (int b = 0; b < nb; ++b)
                    V.mats[b] = sandwich(nt.W[b], inst.constraints[j].psd, b);
                for (int i = 0; i <= j; ++i) {
                    double acc = 0;
                    for (auto& e : inst.constraints[i].psd)
                        acc += e.value * V.mats[e.block](e.row, e.col) *
                               (e.row == e.col ? 1.0 : 2.0);
                    M(i, j) = acc;
                    M(j, i) = acc;
                }
            }
        }

        // Newton system solver. Without free variables: Cholesky of M with
        // refinement, falling back to a min-norm least-squares solve when M
        // is numerically singular (degenerate faces near convergence). With
        // free variables: LU of the augmented system [M -F; F' 0], same
        // fallback. The matrices are never perturbed.
        Eigen::LLT<MatrixXd> lltM;
        Eigen::PartialPivLU<MatrixXd> luK;
        Eigen::CompleteOrthogonalDecomposition<MatrixXd> codK;
        MatrixXd K;
        bool use_cod = false;
        if (nf) {
            K.setZero(m + nf, m + nf);
            K.topLeftCorner(m, m) = M;
            K.topRightCorner(m, nf) = -F;
            K.bottomLeftCorner(nf, m) = F.transpose();
        } else {
            K = M;
        }
        auto raw_solve = [&](const VectorXd& r) -> VectorXd {
            if (use_cod) return codK.solve(r);
            if (nf) return luK.solve(r);
            return lltM.solve(r);
        };
        auto ksolve = [&](const VectorXd& rhs) {
            VectorXd x = raw_solve(rhs);
            for (int ref = 0; ref < 2; ++ref) x += raw_solve(rhs - K * x);
            return x;
        };
        {
            bool ok = false;
            if (nf) {
                luK.compute(K);
                ok = true;
            } else {
                lltM.compute(M);
                ok = lltM.info() == Eigen::Success;
            }
            if (ok) {
                VectorXd probe = VectorXd::Ones(m + nf);
                VectorXd x = ksolve(probe);
                double scale = 1.0 + K.cwiseAbs().maxCoeff();
                ok = (K * x - probe).cwiseAbs().maxCoeff() < 1e-7 * scale;
            }
            if (!ok) {
                use_cod = true;
                codK.compute(K);
            }
        }

        // One Newton solve for a given scaled complementarity target R:
        // M dy - F du = A(R + W Rd W) - rp,  F' dy = rf.
        auto newton = [&](const Blocks& R, Blocks& dX, VectorXd& dy, Blocks& dZ,
                          VectorXd& du) {
            Blocks RW(inst.block_sizes);
            for (int b = 0; b < nb; ++b)
                RW.mats[b] = R.mats[b] + nt.W[b] * Rd.mats[b] * nt.W[b];
            VectorXd h(m);
            std::vector<double> zero_u(nf, 0.0);
            for (int i = 0; i < m; ++i)
                h(i) = apply_row(inst.constraints[i], RW, zero_u) - rp(i);
            VectorXd rhs(m + nf);
            rhs.head(m) = h;
            if (nf) rhs.tail(nf) = rf;
            VectorXd xy = ksolve(rhs);
            dy = xy.head(m);
            du = xy.tail(nf);
            // dZ = A*(dy) + (A*(y) - C - Z) = A*(dy) - Rd.
            dZ = Blocks(inst.block_sizes);
            for (int i = 0; i < m; ++i) add_entries(dZ, inst.constraints[i].psd, dy(i));
            dZ.scale_add(-1.0, Rd);
            dX = Blocks(inst.block_sizes);
            for (int b = 0; b < nb; ++b) {
                MatrixXd T = R.mats[b] - nt.W[b] * dZ.mats[b] * nt.W[b];
                dX.mats[b] = 0.5 * (T + T.transpose());
            }
            if (opts.trace) {
                std::vector<double> duv(du.data(), du.data() + du.size());
                double nerr = 0;
                for (int i = 0; i < m; ++i)
                    nerr = std::max(nerr, std::fabs(apply_row(inst.constraints[i], dX, duv) -
                                                    rp(i)));
                std::fprintf(stderr, "      newton-err=%9.2e kind=%d\n", nerr, (int)use_cod);
            }
        };

        // Predictor (affine direction).
        Blocks Raff(inst.block_sizes);
        for (int b = 0; b < nb; ++b) Raff.mats[b] = -X.mats[b];
        Blocks dXa, dZa;
        VectorXd dya, dua;
        newton(Raff, dXa, dya, dZa, dua);
        double ap = max_step(X, dXa, 1.0);
        double ad = max_step(Z, dZa, 1.0);
        Blocks Xa = X, Za = Z;
        Xa.scale_add(0.995 * ap, dXa);
        Za.scale_add(0.995 * ad, dZa);
        double mu_aff = inner(Xa, Za) / ntot;
        // Short affine steps call for more centering (smaller exponent).
        double expon = std::max(1.0, 3.0 * std::pow(std::min(ap, ad), 2.0));
        double sigma =
            std::pow(std::clamp(mu_aff / std::max(mu, 1e-300), 0.0, 1.0), expon);
        // Keep complementarity from collapsing orders of magnitude below
        // the remaining infeasibility (the Schur systems become unsolvable
        // in double precision there).
        double feas = std::max(res.rp, res.rd);
        if (mu < 1e-4 * feas * mu0) sigma = std::max(sigma, 0.9);

        // Corrector: sigma*mu*Z^{-1} - X - second-order term.
        Blocks Rcor(inst.block_sizes);
        for (int b = 0; b < nb; ++b) {
            MatrixXd so = dXa.mats[b] * dZa.mats[b] * nt.Zinv[b];
            Rcor.mats[b] = sigma * mu * nt.Zinv[b] - X.mats[b] - 0.5 * (so + so.transpose());
        }
        Blocks dX, dZ;
        VectorXd dy, du;
        newton(Rcor, dX, dy, dZ, du);

        double gamma = 0.9 + 0.09 * std::min(last_sp, last_sd);
        if (res.worst() < 1e-6) gamma = std::max(gamma, 0.99);
        double sp = gamma * max_step(X, dX, 1.0 / gamma);
        double sd = gamma * max_step(Z, dZ, 1.0 / gamma);
        sp = std::min(1.0, sp);
        sd = std::min(1.0, sd);

        // If the corrector direction barely moves, retry with a plain
        // centering step before giving up.
        if (std::min(sp, sd) < 0.05) {
            Blocks Rcent(inst.block_sizes);
            double sig2 = std::max(sigma, 0.5);
            for (int b = 0; b < nb; ++b)
                Rcent.mats[b] = sig2 * mu * nt.Zinv[b] - X.mats[b];
            Blocks dX2, dZ2;
            VectorXd dy2, du2;
            newton(Rcent, dX2, dy2, dZ2, du2);
            double sp2 = std::min(1.0, gamma * max_step(X, dX2, 1.0 / gamma));
            double sd2 = std::min(1.0, gamma * max_step(Z, dZ2, 1.0 / gamma));
            if (std::min(sp2, sd2) > std::min(sp, sd)) {
                dX = dX2;
                dZ = dZ2;
                dy = dy2;
                du = du2;
                sp = sp2;
                sd = sd2;
            }
        }
        if (sp <= 1e-10 && sd <= 1e-10) return finalize_best(SdpStatus::max_iter, iter);

        // Equal steps, backtracked into a central-path neighborhood:
        // lambda_min(XZ) >= beta * mu keeps the scaling matrices sane on
        // degenerate optimal faces.
        double s = std::min(sp, sd);
        const double beta = 1e-3;
        for (int bt = 0; bt < 30 && s > 1e-10; ++bt) {
            Blocks Xt = X, Zt = Z;
            Xt.scale_add(s, dX);
            Zt.scale_add(s, dZ);
            double mut = inner(Xt, Zt) / ntot;
            if (mut > 0 && min_eig_xz(Xt, Zt) >= beta * mut) break;
            s *= 0.7;
        }
        if (s <= 1e-10) return finalize_best(SdpStatus::max_iter, iter);

        last_sp = s;
        last_sd = s;
        X.scale_add(s, dX);
        if (nf) u += s * du;
        y += s * dy;
        Z.scale_add(s, dZ);
        if (opts.trace) {
            Blocks Rd2(inst.block_sizes);
            Rd2 += C;
            Rd2 += Z;
            for (int i = 0; i < m; ++i) add_entries(Rd2, inst.constraints[i].psd, -y(i));
            double rd2 = 0;
            for (auto& Mb : Rd2.mats)
                if (Mb.size()) rd2 = std::max(rd2, Mb.cwiseAbs().maxCoeff());
            double rdprev = 0;
            for (auto& Mb : Rd.mats)
                if (Mb.size()) rdprev = std::max(rdprev, Mb.cwiseAbs().maxCoeff());
            std::fprintf(stderr, "      s=%.4f rd_after=%9.2e expect=%9.2e dynorm=%9.2e\n",
                         s, rd2, (1 - s) * rdprev, dy.cwiseAbs().maxCoeff());
        }
    }
    return finalize_best(SdpStatus::max_iter, opts.max_iter);
}

// Gram matrix of the constraint rows under the trace inner product.
MatrixXd row_gram(const SdpInstance& inst) {
    const int m = inst.m();
    MatrixXd G = MatrixXd::Zero(m, m);
    std::vector<std::vector<std::tuple<long, double, bool>>> keys(m);
    std::vector<int> block_off(inst.nblocks() + 1, 0);
    for (int b = 0; b < inst.nblocks(); ++b)
        block_off[b + 1] = block_off[b] + inst.block_sizes[b] * inst.block_sizes[b];
    long psd_total = block_off[inst.nblocks()];
    for (int i = 0; i < m; ++i) {
        for (auto& e : inst.constraints[i].psd)
            keys[i].emplace_back(block_off[e.block] +
                                     static_cast<long>(e.row) * inst.block_sizes[e.block] +
                                     e.col,
                                 e.value, e.row == e.col);
        for (auto& [idx, v] : inst.constraints[i].free_terms)
            keys[i].emplace_back(psd_total + idx, v, true);
        std::sort(keys[i].begin(), keys[i].end());
    }
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            double acc = 0;
            auto a = keys[i].begin();
            auto b2 = keys[j].begin();
            while (a != keys[i].end() && b2 != keys[j].end()) {
                if (std::get<0>(*a) < std::get<0>(*b2))
                    ++a;
                else if (std::get<0>(*b2) < std::get<0>(*a))
                    ++b2;
                else {
                    acc += std::get<1>(*a) * std::get<1>(*b2) *
                           (std::get<2>(*a) ? 1.0 : 2.0);
                    ++a;
                    ++b2;
                }
            }
            G(i, j) = acc;
            G(j, i) = acc;
        }
    return G;
}

// Least-squares projection of (X, u) onto the affine constraint set; applied
// as a final refinement when it lowers the recomputed residuals.
void polish_solution(const SdpInstance& inst, SdpSolution& sol) {
    const int m = inst.m();
    if (m == 0 || m > 5000) return;
    std::vector<double> uv = sol.u;
    VectorXd r(m);
    Blocks Xb;
    for (auto& Mb : sol.X) Xb.mats.push_back(Mb);
    for (int i = 0; i < m; ++i)
        r(i) = inst.b[i] - apply_row(inst.constraints[i], Xb, uv);
    if (r.cwiseAbs().maxCoeff() == 0.0) return;

    // Min-norm least-squares multipliers: the row Gram is often singular
    // (dependent coefficient-matching rows), so use a rank-revealing solve.
    MatrixXd G = row_gram(inst);
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(G);

    auto affine_project = [&](SdpSolution& s) {
        std::vector<double> uv2 = s.u;
        Blocks Xc;
        for (auto& Mb : s.X) Xc.mats.push_back(Mb);
        VectorXd rr(m);
        for (int i = 0; i < m; ++i)
            rr(i) = inst.b[i] - apply_row(inst.constraints[i], Xc, uv2);
        VectorXd nu = cod.solve(rr);
        nu += cod.solve(rr - G * nu);
        for (int i = 0; i < m; ++i) {
            for (auto& e : inst.constraints[i].psd) {
                s.X[e.block](e.row, e.col) += nu(i) * e.value;
                if (e.row != e.col) s.X[e.block](e.col, e.row) += nu(i) * e.value;
            }
            for (auto& [idx, v] : inst.constraints[i].free_terms) s.u[idx] += nu(i) * v;
        }
    };
    auto min_eig = [&](const SdpSolution& s) {
        double lmin = 0;
        for (auto& Mb : s.X) {
            if (!Mb.size()) continue;
            Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (Mb + Mb.transpose()),
                                                        Eigen::EigenvaluesOnly);
            lmin = std::min(lmin, eig.eigenvalues().minCoeff());
        }
        return lmin;
    };
    auto score = [&](const SdpSolution& s) {
        Residuals rs = residuals(inst, s);
        return std::max({rs.primal, rs.dual, rs.gap, -min_eig(s)});
    };

    SdpSolution best = sol;
    double best_score = score(sol);
    // Alternating projections between the affine constraint set and the PSD
    // cone, keeping the best iterate. Convergence is linear with a rate that
    // degrades on thin faces, so be patient.
    SdpSolution cand = sol;
    int since_best = 0;
    for (int round = 0; round < 400 && since_best < 40; ++round) {
        affine_project(cand);
        double sc = score(cand);
        if (sc < 0.999 * best_score) {
            best_score = sc;
            best = cand;
            since_best = 0;
        } else {
            ++since_best;
        }
        if (sc < 1e-11) break;
        for (auto& Mb : cand.X) {
            if (!Mb.size()) continue;
            Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (Mb + Mb.transpose()));
            VectorXd ev = eig.eigenvalues().cwiseMax(0.0);
            Mb = eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
        }
        double sc2 = score(cand);
        if (sc2 < 0.999 * best_score) {
            best_score = sc2;
            best = cand;
            since_best = 0;
        }
    }
    Residuals rb = residuals(inst, best);
    best.primal_res = rb.primal;
    best.dual_res = rb.dual;
    best.gap = rb.gap;
    double pobj = 0;
    for (auto& e : inst.c_psd)
        pobj += e.value * best.X[e.block](e.row, e.col) * (e.row == e.col ? 1.0 : 2.0);
    for (int j = 0; j < inst.nfree; ++j) pobj += inst.c_free[j] * best.u[j];
    best.primal_obj = pobj;
    sol = best;
}

} // namespace

SdpSolution solve(const SdpInstance& inst, const SolveOptions& opts) {
    inst.validate();
    // Row equilibration: scale every constraint to unit infinity norm. The
    // certificate-side variables X, u are unchanged; y is rescaled back.
    SdpInstance scaled = inst;
    std::vector<double> rownorm(inst.m(), 1.0);
    for (int i = 0; i < inst.m(); ++i) {
        double s = 0;
        for (auto& e : scaled.constraints[i].psd) s = std::max(s, std::fabs(e.value));
        for (auto& [idx, v] : scaled.constraints[i].free_terms)
            s = std::max(s, std::fabs(v));
        if (s > 0) rownorm[i] = s;
        for (auto& e : scaled.constraints[i].psd) e.value /= rownorm[i];
        for (auto& [idx, v] : scaled.constraints[i].free_terms) v /= rownorm[i];
        scaled.b[i] /= rownorm[i];
    }
    // Presolve: drop linearly dependent equality rows (their multipliers
    // re-embed as zeros; the dropped constraints are implied and the final
    // residuals are still measured against the full instance).
    std::vector<int> kept;
    {
        MatrixXd G = row_gram(scaled);
        Eigen::LDLT<MatrixXd> ldlt(G);
        Eigen::VectorXd D = ldlt.vectorD();
        double dmax = D.size() ? std::max(0.0, D.maxCoeff()) : 0.0;
        Eigen::VectorXi idx = Eigen::VectorXi::LinSpaced(inst.m(), 0, inst.m() - 1);
        idx = ldlt.transpositionsP() * idx;
        for (int i = 0; i < inst.m(); ++i)
            if (D(i) > 1e-10 * dmax) kept.push_back(idx(i));
        std::sort(kept.begin(), kept.end());
    }
    SdpSolution sol;
    if (static_cast<int>(kept.size()) == inst.m()) {
        sol = solve_core(scaled, opts);
    } else {
        SdpInstance reduced = scaled;
        reduced.constraints.clear();
        reduced.b.clear();
        for (int i : kept) {
            reduced.constraints.push_back(scaled.constraints[i]);
            reduced.b.push_back(scaled.b[i]);
        }
        SdpSolution rsol = solve_core(reduced, opts);
        sol = rsol;
        sol.y.assign(inst.m(), 0.0);
        for (std::size_t i = 0; i < kept.size(); ++i) sol.y[kept[i]] = rsol.y[i];
    }
    for (int i = 0; i < inst.m(); ++i) sol.y[i] /= rownorm[i];

    // Zero-objective instances (pure feasibility): (y, Z) = 0 is an exact
    // dual optimum whenever the primal side is feasible, so adopt it when it
    // beats the iterates.
    bool zero_objective = inst.c_psd.empty();
    for (double v : inst.c_free)
        if (v != 0.0) zero_objective = false;
    if (zero_objective) {
        SdpSolution cand = sol;
        std::fill(cand.y.begin(), cand.y.end(), 0.0);
        for (auto& Zb : cand.Z) Zb.setZero();
        Residuals rc = residuals(inst, cand);
        Residuals r0 = residuals(inst, sol);
        if (rc.primal + rc.dual + rc.gap < r0.primal + r0.dual + r0.gap) sol = cand;
    }

    if (opts.polish) polish_solution(inst, sol);

    Residuals r = residuals(inst, sol);
    sol.primal_res = r.primal;
    sol.dual_res = r.dual;
    sol.gap = r.gap;
    double pobj = 0;
    for (auto& e : inst.c_psd)
        pobj += e.value * sol.X[e.block](e.row, e.col) * (e.row == e.col ? 1.0 : 2.0);
    for (int j = 0; j < inst.nfree; ++j) pobj += inst.c_free[j] * sol.u[j];
    sol.primal_obj = pobj;
    sol.dual_obj = 0;
    for (int i = 0; i < inst.m(); ++i) sol.dual_obj += inst.b[i] * sol.y[i];
    if (sol.status == SdpStatus::optimal) {
        double bn = 0, cn = 0;
        for (double v : inst.b) bn = std::max(bn, std::fabs(v));
        for (auto& e : inst.c_psd) cn = std::max(cn, std::fabs(e.value));
        for (double v : inst.c_free) cn = std::max(cn, std::fabs(v));
        double worst = std::max({sol.primal_res / (1.0 + bn), sol.dual_res / (1.0 + cn),
                                 sol.gap / (1.0 + std::fabs(sol.primal_obj) +
                                            std::fabs(sol.dual_obj))});
        if (worst > 10 * opts.tol) sol.status = SdpStatus::max_iter;
    } else if (sol.status == SdpStatus::max_iter) {
        double bn = 0, cn = 0;
        for (double v : inst.b) bn = std::max(bn, std::fabs(v));
        for (auto& e : inst.c_psd) cn = std::max(cn, std::fabs(e.value));
        for (double v : inst.c_free) cn = std::max(cn, std::fabs(v));
        double worst = std::max({sol.primal_res / (1.0 + bn), sol.dual_res / (1.0 + cn),
                                 sol.gap / (1.0 + std::fabs(sol.primal_obj) +
                                            std::fabs(sol.dual_obj))});
        if (worst < opts.tol) sol.status = SdpStatus::optimal;
    }
    return sol;
}

} // namespace sparsos
