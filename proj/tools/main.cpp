#include "sparsos/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"sparse sums-of-squares certificates with uniform denominators"};
    app.require_subcommand(1);
    sparsos::CliOptions opts;

    auto add_common = [&](CLI::App* sub, bool with_solver_flags) {
        sub->add_option("file", opts.file, "problem file")->required();
        sub->add_option("-k,--order", opts.order, "relaxation order k");
        sub->add_option("--cliques", opts.cliques_mode,
                        "clique source: auto | user")
            ->check(CLI::IsMember({"auto", "user"}));
        sub->add_flag("-q,--quiet", opts.quiet, "only the bound/status line");
        if (with_solver_flags) {
            sub->add_option("-e,--epsilon", opts.epsilon,
                            "perturbation epsilon (rational)");
            sub->add_option("-d,--degree", opts.degree, "relaxation degree d");
            sub->add_option("--formulation", opts.formulation, "A | B")
                ->check(CLI::IsMember({"A", "B", "a", "b"}));
            sub->add_option("--tol", opts.tol, "solver tolerance");
            sub->add_flag("--dense", opts.dense, "dense Putinar baseline");
            sub->add_flag("--reznick", opts.reznick,
                          "homogeneous uniform-denominator mode");
        }
    };

    auto* analyze = app.add_subcommand("analyze", "sparsity and size report");
    add_common(analyze, false);
    analyze->add_option("-d,--degree", opts.degree, "degree d for the size table");

    auto* solve = app.add_subcommand("solve", "build and solve the relaxation");
    add_common(solve, true);

    auto* certify =
        app.add_subcommand("certify", "solve, extract and write a certificate");
    add_common(certify, true);
    certify->add_flag("--exact", opts.exact, "round to an exact rational certificate");
    certify->add_option("--max-denominator", opts.max_denominator,
                        "denominator bound for --exact");
    certify->add_option("-o,--out", opts.out, "certificate output path");

    auto* verify = app.add_subcommand("verify", "check a certificate file");
    verify->add_option("cert", opts.cert_file, "certificate file")->required();
    verify->add_option("--problem", opts.file, "cross-check against a problem file");
    verify->add_flag("--exact", opts.exact, "exact rational verification");
    verify->add_option("--tol", opts.tol, "float verification tolerance");

    auto* exp = app.add_subcommand("export", "write the relaxation in SDPA sparse format");
    add_common(exp, true);
    exp->add_option("--sdpa,-o,--out", opts.out, "output path (.dat-s)");

    opts.tol = 1e-8;
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (verify->parsed() && verify->count("--tol") == 0) opts.tol = 1e-6;

    if (analyze->parsed()) return sparsos::cmd_analyze(opts, std::cout, std::cerr);
    if (solve->parsed()) return sparsos::cmd_solve(opts, std::cout, std::cerr);
    if (certify->parsed()) return sparsos::cmd_certify(opts, std::cout, std::cerr);
    if (verify->parsed()) return sparsos::cmd_verify(opts, std::cout, std::cerr);
    if (exp->parsed()) return sparsos::cmd_export(opts, std::cout, std::cerr);
    return 2;
}
