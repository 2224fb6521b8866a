#include "sparsos/commands.hpp"
#include "sparsos/certificate.hpp"
#include "sparsos/error.hpp"
#include "sparsos/problem_file.hpp"

#include <cmath>
#include <ostream>
#include <functional>
#include <sstream>

namespace sparsos {

namespace {

std::string fmt_bound(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

CliqueDecomposition choose_cliques(const ProblemFile& pf, const CliOptions& opts,
                                   std::ostream& out) {
    bool user = !pf.cliques.empty() && opts.cliques_mode != "auto";
    if (opts.cliques_mode == "user" && pf.cliques.empty())
        throw Error("--cliques user requires clique lines in the problem file");
    if (user) {
        // Used verbatim when valid; a violation aborts the run.
        return make_decomposition(pf.nvars, pf.cliques);
    }
    VarGraph g = build_csp_graph(pf.objective, pf.constraints);
    CliqueDecomposition cd = chordal_cliques(g);
    if (!pf.cliques.empty() && opts.cliques_mode == "auto" && !pf.cliques.empty())
        out << "note: clique lines present but --cliques auto selected; "
               "re-decomposing\n";
    return cd;
}

struct BuiltProblem {
    ProblemFile pf;
    SparsePop pop;
    RelaxationProblem rp;
    int d = 0;
};

BuiltProblem build_relaxation(const CliOptions& opts, std::ostream& out,
                              std::optional<Rational> lambda_fixed = std::nullopt) {
    BuiltProblem bp;
    bp.pf = read_problem(opts.file);
    CliqueDecomposition cd = choose_cliques(bp.pf, opts, out);
    bp.pop = build_sparse_pop(bp.pf.objective, bp.pf.constraints, cd);
    Rational eps = rat_parse(opts.epsilon);
    Formulation form = formulation_from_string(opts.formulation);

    if (opts.dense) {
        bp.d = opts.degree.value_or(default_degree(RelaxMode::dense_putinar, bp.pf.objective));
        bp.rp = build_dense_putinar(bp.pf.objective, bp.pf.constraints, opts.order,
                                    lambda_fixed);
    } else if (opts.reznick) {
        if (!bp.pf.objective.is_homogeneous())
            throw Error("homogeneous mode requires a homogeneous objective");
        bp.d = opts.degree.value_or(
            default_degree(RelaxMode::homogeneous_reznick, bp.pf.objective));
        RationalFormSum in;
        in.p = bp.pop.objective_parts;
        in.kl.assign(cd.p(), 0);
        in.d = bp.d;
        bp.rp = build_homogeneous_reznick(in, bp.pop.cd, opts.order);
    } else if (bp.pf.constraints.empty()) {
        bp.d = opts.degree.value_or(default_degree(RelaxMode::pv_global, bp.pf.objective));
        bp.rp = build_pv_global(bp.pop, eps, bp.d, opts.order, form, lambda_fixed);
    } else {
        bp.d = opts.degree.value_or(
            default_degree(RelaxMode::pv_constrained, bp.pf.objective));
        bp.rp = build_pv_constrained(bp.pop, eps, bp.d, opts.order, form, lambda_fixed);
    }
    for (auto& w : bp.rp.warnings) out << "warning: " << w << "\n";
    return bp;
}

void print_clique_line(std::ostream& out, const std::vector<int>& vars) {
    out << "{";
    for (std::size_t i = 0; i < vars.size(); ++i)
        out << (i ? ", " : "") << "x" << vars[i] + 1;
    out << "}";
}

int run_guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace

int cmd_analyze(const CliOptions& opts, std::ostream& out, std::ostream& err) {
    return run_guarded(err, [&]() {
        ProblemFile pf = read_problem(opts.file);
        CliqueDecomposition cd = choose_cliques(pf, opts, out);
        SparsePop pop = build_sparse_pop(pf.objective, pf.constraints, cd);

        out << "variables: " << pf.nvars << "\n";
        out << "constraints: " << pf.constraints.size();
        if (!pop.equality_pairs.empty())
            out << " (" << pop.equality_pairs.size() << " equality pair"
                << (pop.equality_pairs.size() > 1 ? "s" : "") << " merged)";
        out << "\n";
        out << "cliques: " << cd.p() << "  tau: " << cd.tau() << "\n";
        for (int l = 0; l < cd.p(); ++l) {
            out << "  I_" << l + 1 << " = ";
            print_clique_line(out, cd.cliques[l]);
            if (l > 0) {
                out << "  parent s = " << cd.parents[l] + 1 << "  separator = ";
                print_clique_line(out, cd.separators[l]);
            }
            out << "\n";
        }
        out << "rip: satisfied\n";
        int d = opts.degree.value_or(default_degree(
            pf.constraints.empty() ? RelaxMode::pv_global : RelaxMode::pv_constrained,
            pf.objective));
        print_size_report(out, size_report(pop, opts.order, d));
        return 0;
    });
}

int cmd_solve(const CliOptions& opts, std::ostream& out, std::ostream& err) {
    int build_rc = 2;
    SdpStatus status = SdpStatus::max_iter;
    int rc = run_guarded(err, [&]() {
        BuiltProblem bp = build_relaxation(opts, out);
        SdpLift lift = lift_to_sdp(bp.rp);
        SolveOptions so;
        so.tol = opts.tol;
        so.max_iter = 200;
        SdpSolution sol = solve(lift.inst, so);
        status = sol.status;

        bool feasibility = !bp.rp.has_lambda;
        std::string statestr = to_string(sol.status);
        if (opts.quiet) {
            if (feasibility)
                out << "status=" << statestr << "\n";
            else
                out << "rho_k = " << fmt_bound(sol.primal_obj) << " status=" << statestr
                    << "\n";
        } else {
            out << "mode: " << to_string(bp.rp.mode) << " (formulation "
                << to_string(bp.rp.form) << ")\n";
            out << "epsilon: " << rat_to_string(bp.rp.eps) << "\n";
            out << "k: " << bp.rp.k << "  d: " << bp.d << "\n";
            out << "blocks:";
            for (int s : lift.inst.block_sizes) out << " " << s;
            out << "\n";
            out << "constraints: " << lift.inst.m()
                << "  free variables: " << lift.inst.nfree << "\n";
            out << "status: " << statestr << "\n";
            if (!feasibility) out << "rho_k = " << fmt_bound(sol.primal_obj) << "\n";
            out << "residuals: primal " << fmt_bound(sol.primal_res) << "  dual "
                << fmt_bound(sol.dual_res) << "  gap " << fmt_bound(sol.gap) << "\n";
        }
        build_rc = 0;
        return 0;
    });
    if (rc != 0) return rc;
    if (build_rc != 0) return build_rc;
    return status == SdpStatus::optimal ? 0 : 1;
}

int cmd_export(const CliOptions& opts, std::ostream& out, std::ostream& err) {
    return run_guarded(err, [&]() {
        BuiltProblem bp = build_relaxation(opts, out);
        SdpLift lift = lift_to_sdp(bp.rp);
        std::string path = opts.out.empty() ? opts.file + ".dat-s" : opts.out;
        export_sdpa(lift.inst, path);
        if (!opts.quiet)
            out << "wrote " << path << " (m=" << lift.inst.m() << ", blocks="
                << lift.inst.nblocks() + (lift.inst.nfree ? 2 : 0) << ")\n";
        return 0;
    });
}

int cmd_certify(const CliOptions& opts, std::ostream& out, std::ostream& err) {
    int result = 2;
    int rc = run_guarded(err, [&]() {
        BuiltProblem bp = build_relaxation(opts, out);
        SdpLift lift = lift_to_sdp(bp.rp);
        SolveOptions so;
        so.tol = opts.tol;
        so.max_iter = 200;
        SdpSolution sol = solve(lift.inst, so);
        if (sol.status != SdpStatus::optimal) {
            out << "status: " << to_string(sol.status) << " (no certificate)\n";
            result = 1;
            return 0;
        }

        SparseCertificate cert;
        if (opts.exact) {
            // Back off the bound slightly and certify the fixed value with an
            // interior iterate; the exact projection closes the identity.
            std::optional<Rational> lam_fixed;
            if (bp.rp.has_lambda) {
                double backoff = 1e-5 * (1.0 + std::fabs(sol.primal_obj));
                lam_fixed = rat_best_approx(rat_from_double(sol.primal_obj - backoff),
                                            Integer(1000000));
                out << "certifying bound " << rat_to_string(*lam_fixed)
                    << " (backed off from " << fmt_bound(sol.primal_obj) << ")\n";
            }
            BuiltProblem fixed = bp;
            if (lam_fixed) {
                fixed = build_relaxation(opts, out, lam_fixed);
                lift = lift_to_sdp(fixed.rp);
            }
            SolveOptions si = so;
            si.polish = false;
            SdpSolution isol = solve(lift.inst, si);
            if (isol.status != SdpStatus::optimal) {
                out << "status: " << to_string(isol.status) << " (no certificate)\n";
                result = 1;
                return 0;
            }
            SparseCertificate raw = extract(lam_fixed ? fixed.rp : bp.rp, isol);
            RoundingResult rr = round_to_rational(raw, Integer(opts.max_denominator));
            if (!rr.ok) {
                out << "rounding-failure: " << rr.failure << "\n";
                out << "(raise --order or --max-denominator)\n";
                result = 1;
                return 0;
            }
            cert = std::move(rr.cert);
            VerifyReport rep = verify_exact(cert);
            out << (rep.pass ? "verify_exact: PASS" : "verify_exact: FAIL") << "\n";
            result = rep.pass ? 0 : 1;
        } else {
            cert = extract(bp.rp, sol);
            VerifyReport rep = verify_float(cert, 1e-6);
            if (bp.rp.has_lambda) out << "rho_k = " << fmt_bound(sol.primal_obj) << "\n";
            out << (rep.pass ? "verify_float: PASS" : "verify_float: FAIL")
                << " (residual " << fmt_bound(rep.max_residual) << ", min eigenvalue "
                << fmt_bound(rep.min_eigenvalue) << ", tol 1e-06)\n";
            result = rep.pass ? 0 : 1;
        }
        std::string path = opts.out.empty() ? opts.file + ".cert" : opts.out;
        write_certificate(cert, path);
        if (!opts.quiet) out << "wrote " << path << "\n";
        return 0;
    });
    return rc != 0 ? rc : result;
}

int cmd_verify(const CliOptions& opts, std::ostream& out, std::ostream& err) {
    int result = 2;
    int rc = run_guarded(err, [&]() {
        SparseCertificate cert = read_certificate(opts.cert_file);
        if (!opts.file.empty()) {
            // Cross-check embedded problem data against the given file.
            ProblemFile pf = read_problem(opts.file);
            if (!(pf.objective == cert.objective))
                throw Error("certificate objective differs from the problem file");
            if (pf.constraints.size() != cert.constraints.size())
                throw Error("certificate constraint count differs from the problem file");
            for (std::size_t j = 0; j < pf.constraints.size(); ++j)
                if (!(pf.constraints[j] == cert.constraints[j]))
                    throw Error("certificate constraint " + std::to_string(j + 1) +
                                " differs from the problem file");
        }
        VerifyReport rep;
        if (opts.exact) {
            rep = verify_exact(cert);
            out << (rep.pass ? "PASS" : "FAIL") << " (exact)";
            if (!rep.pass && !rep.exact_residual.is_zero())
                out << " residual one-norm "
                    << rep.exact_residual.one_norm().to_string();
            out << "\n";
        } else {
            rep = verify_float(cert, opts.tol);
            out << (rep.pass ? "PASS" : "FAIL") << " (residual "
                << fmt_bound(rep.max_residual) << ", min eigenvalue "
                << fmt_bound(rep.min_eigenvalue) << ", tol " << fmt_bound(opts.tol)
                << ")\n";
        }
        if (!rep.pass && !rep.detail.empty()) out << rep.detail;
        result = rep.pass ? 0 : 1;
        return 0;
    });
    return rc != 0 ? rc : result;
}

} // namespace sparsos
