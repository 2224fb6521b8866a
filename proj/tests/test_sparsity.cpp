#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sparsos/cliques.hpp"
#include "sparsos/sparse_pop.hpp"
#include "sparsos/error.hpp"

#include <random>

using namespace sparsos;

namespace {

Polynomial P(const std::string& s, int n) { return Polynomial::parse(s, n); }

VarGraph graph_of(int n, std::initializer_list<std::pair<int, int>> edges) {
    VarGraph g(n);
    for (auto& [a, b] : edges) g.add_edge(a, b);
    return g;
}

VarGraph random_graph(std::mt19937& rng, int n, double density) {
    VarGraph g(n);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (u(rng) < density) g.add_edge(i, j);
    return g;
}

} // namespace

TEST_CASE("csp graph construction") {
    Polynomial f = P("x1*x2 + x2^2*x3", 3);
    VarGraph g = build_csp_graph(f, {});
    CHECK(g.edge_count() == 2);
    CHECK(g.has_edge(0, 1));
    CHECK(g.has_edge(1, 2));
    CHECK(!g.has_edge(0, 2));

    VarGraph gc = build_csp_graph(P("5", 3), {});
    CHECK(gc.edge_count() == 0);

    // Constrained instance: g1 = x2^3, g2 = -x2^3, g3 = x3 add no edges.
    std::vector<Polynomial> cons = {P("x2^3", 3), P("-x2^3", 3), P("x3", 3)};
    VarGraph ge = build_csp_graph(f, cons);
    CHECK(ge.edge_count() == 2);
    CHECK(ge.has_edge(0, 1));
    CHECK(ge.has_edge(1, 2));
}

TEST_CASE("chordal cliques on known graphs") {
    // Path 1-2-3-4.
    CliqueDecomposition cd = chordal_cliques(graph_of(4, {{0, 1}, {1, 2}, {2, 3}}));
    REQUIRE(cd.p() == 3);
    CHECK(cd.cliques[0] == std::vector<int>{0, 1});
    CHECK(cd.cliques[1] == std::vector<int>{1, 2});
    CHECK(cd.cliques[2] == std::vector<int>{2, 3});
    CHECK(check_rip(cd.cliques).ok);

    // Complete graph on 3 vertices.
    CliqueDecomposition k3 = chordal_cliques(graph_of(3, {{0, 1}, {0, 2}, {1, 2}}));
    REQUIRE(k3.p() == 1);
    CHECK(k3.cliques[0] == std::vector<int>{0, 1, 2});

    // 4-cycle: one fill edge, two triangles.
    CliqueDecomposition c4 = chordal_cliques(graph_of(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}));
    REQUIRE(c4.p() == 2);
    CHECK(c4.n_l(0) == 3);
    CHECK(c4.n_l(1) == 3);
    CHECK(check_rip(c4.cliques).ok);
}

TEST_CASE("check_rip") {
    RipCheck ok = check_rip({{0, 1}, {1, 2}, {2, 3}});
    CHECK(ok.ok);
    CHECK(ok.parents == std::vector<int>{-1, 0, 1});

    RipCheck bad = check_rip({{0, 1}, {2, 3}, {0, 2}});
    CHECK(!bad.ok);
    CHECK(bad.violator == 2);

    CHECK(check_rip({{0, 1, 2}}).ok);
}

TEST_CASE("chordal output always satisfies RIP (random graphs)") {
    std::mt19937 rng(123);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 2 + static_cast<int>(rng() % 11);
        VarGraph g = random_graph(rng, n, 0.15 + 0.6 * (trial % 5) / 4.0);
        CliqueDecomposition cd = chordal_cliques(g);
        CHECK(check_rip(cd.cliques, &cd.parents).ok);
        // Every vertex covered.
        std::set<int> cov;
        for (auto& c : cd.cliques) cov.insert(c.begin(), c.end());
        CHECK(static_cast<int>(cov.size()) == n);
        // Every edge inside some clique.
        for (int a = 0; a < n; ++a)
            for (int b : g.adj[a]) {
                bool inside = false;
                for (auto& c : cd.cliques) {
                    bool ha = std::find(c.begin(), c.end(), a) != c.end();
                    bool hb = std::find(c.begin(), c.end(), b) != c.end();
                    if (ha && hb) inside = true;
                }
                CHECK(inside);
            }
    }
}

TEST_CASE("objective decomposition") {
    // Three-variable quartic over cliques {1,2},{2,3}.
    Polynomial f = P("x1^2 - 2*x1*x2 + 3*x2^2 - 2*x1^2*x2 + 2*x1^2*x2^2 - 2*x2*x3 + "
                     "6*x3^2 + 18*x2^2*x3 - 54*x2*x3^2 + 142*x2^2*x3^2", 3);
    CliqueDecomposition cd = make_decomposition(3, {{0, 1}, {1, 2}});
    auto parts = decompose_objective(f, cd);
    REQUIRE(parts.size() == 2);
    CHECK(parts[0] == P("x1^2 - 2*x1*x2 + 3*x2^2 - 2*x1^2*x2 + 2*x1^2*x2^2", 3));
    CHECK(parts[1] == P("-2*x2*x3 + 6*x3^2 + 18*x2^2*x3 - 54*x2*x3^2 + 142*x2^2*x3^2", 3));
    CHECK(parts[0] + parts[1] == f);

    // Fully covered by the first clique.
    auto p2 = decompose_objective(P("x1 + x2", 3), cd);
    CHECK(p2[0] == P("x1 + x2", 3));
    CHECK(p2[1].is_zero());

    CHECK_THROWS_WITH_AS(static_cast<void>(decompose_objective(P("x1*x3", 3), cd)),
                         doctest::Contains("x1*x3"), Error);
}

TEST_CASE("constraint assignment") {
    CliqueDecomposition cd = make_decomposition(3, {{0, 1}, {1, 2}});
    std::vector<Polynomial> g = {P("x2^3", 3), P("-x2^3", 3), P("x3", 3)};
    auto jl = assign_constraints(g, cd);
    CHECK(jl[0] == std::vector<int>{0, 1}); // support {x2} goes to the lowest clique
    CHECK(jl[1] == std::vector<int>{2});

    auto jc = assign_constraints({P("7", 3)}, cd);
    CHECK(jc[0] == std::vector<int>{0});

    CHECK_THROWS_AS(static_cast<void>(assign_constraints({P("x1*x3", 3)}, cd)), Error);
}

TEST_CASE("denominator polynomials") {
    // Cliques {1,2},{2,3}.
    CliqueDecomposition cd = make_decomposition(3, {{0, 1}, {1, 2}});
    DenominatorSet ds = build_denominators(cd);
    CHECK(ds.theta[0] == P("x1^2 + x2^2 + 1", 3));
    CHECK(ds.theta[1] == P("x2^2 + x3^2 + 1", 3));
    CHECK(ds.d[0] == P("x2^2 + 1", 3));
    CHECK(ds.d[1] == P("x2^2 + 1", 3));
    CHECK(ds.big_theta[0] == P("x2^2 + 1", 3) * P("x1^2 + x2^2 + 1", 3));
    CHECK(ds.big_theta[1] == P("x2^2 + 1", 3) * P("x2^2 + x3^2 + 1", 3));
    CHECK(ds.omega[0] == 2);
    CHECK(ds.omega[1] == 2);

    // Cliques {1,2,3,4},{1,2,3,5}: Phi_1 = Phi_2 = x1^2+x2^2+x3^2.
    CliqueDecomposition cd2 = make_decomposition(5, {{0, 1, 2, 3}, {0, 1, 2, 4}});
    DenominatorSet ds2 = build_denominators(cd2);
    CHECK(ds2.phi[0] == P("x1^2 + x2^2 + x3^2", 5));
    CHECK(ds2.phi[1] == P("x1^2 + x2^2 + x3^2", 5));
    CHECK(ds2.h[0] == P("x1^2 + x2^2 + x3^2 + x4^2", 5) * ds2.phi[0]);

    // Single clique: everything degenerates to the dense setting.
    CliqueDecomposition cd1 = make_decomposition(2, {{0, 1}});
    DenominatorSet ds1 = build_denominators(cd1);
    CHECK(ds1.phi[0] == P("1", 2));
    CHECK(ds1.d[0] == P("1", 2));
    CHECK(ds1.big_theta[0] == ds1.theta[0]);
    CHECK(ds1.omega[0] == 1);
}

TEST_CASE("denominator invariants on random decompositions") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 3 + static_cast<int>(rng() % 6);
        VarGraph g = random_graph(rng, n, 0.4);
        CliqueDecomposition cd = chordal_cliques(g);
        DenominatorSet ds = build_denominators(cd);
        for (int l = 0; l < cd.p(); ++l) {
            CHECK(ds.big_theta[l] == ds.theta[l] * ds.d[l]);
            CHECK(ds.omega[l] == ds.big_theta[l].degree() / 2);
            CHECK(ds.omega[l] == 1 + ds.d[l].degree() / 2);
            // Phi_l vanishes exactly when an empty separator enters its
            // product (disconnected patterns); otherwise deg Phi = deg D.
            bool empty_sep = (l > 0 && cd.separators[l].empty());
            for (int j = l + 1; j < cd.p(); ++j)
                if (cd.parents[j] == l && cd.separators[j].empty()) empty_sep = true;
            if (empty_sep)
                CHECK(ds.phi[l].is_zero());
            else
                CHECK(ds.phi[l].degree() == ds.d[l].degree());
            std::set<int> cset(cd.cliques[l].begin(), cd.cliques[l].end());
            CHECK(ds.big_theta[l].supported_in(cset));
            CHECK(ds.h[l].supported_in(cset));
        }
        // BigTheta >= 1 at sampled real points (each factor is 1 + sum of squares).
        std::uniform_real_distribution<double> u(-3, 3);
        for (int s = 0; s < 5; ++s) {
            std::vector<Coeff> pt;
            for (int i = 0; i < n; ++i) pt.emplace_back(u(rng));
            for (int l = 0; l < cd.p(); ++l)
                CHECK(ds.big_theta[l].to_float().evaluate(pt).flt() >= 1.0);
        }
    }
}

TEST_CASE("telescoping transfer identity") {
    std::mt19937 rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 4 + static_cast<int>(rng() % 4);
        CliqueDecomposition cd = chordal_cliques(random_graph(rng, n, 0.45));
        if (cd.p() < 2) continue;
        // Random psi_l over the separator variables.
        std::vector<Polynomial> psi(cd.p(), Polynomial::zero(n));
        std::uniform_int_distribution<int> coef(-3, 3);
        for (int l = 1; l < cd.p(); ++l)
            for (int v : cd.separators[l])
                psi[l].add_term(Monomial::var(v, 1 + static_cast<int>(rng() % 2)),
                                Coeff(Rational(coef(rng))));
        Polynomial total = Polynomial::zero(n);
        for (int l = 1; l < cd.p(); ++l) total = total + psi[l];
        for (int l = 0; l < cd.p(); ++l)
            for (int j = l + 1; j < cd.p(); ++j)
                if (cd.parents[j] == l) total = total - psi[j];
        CHECK(total.is_zero());
    }
}

TEST_CASE("size report") {
    // Quartic over cliques {1,2},{2,3}: k=1, d=2 gives 15x15 clique blocks.
    Polynomial f = P("x1^4 + x2^4 + x3^4", 3);
    CliqueDecomposition cd = make_decomposition(3, {{0, 1}, {1, 2}});
    SparsePop pop = build_sparse_pop(f, {}, cd);
    SizeReport r = size_report(pop, 1, 2);
    CHECK(r.rows[0].gram_dim == 15); // C(2 + 2 + 2, 2)
    CHECK(r.rows[1].gram_dim == 15);
    CHECK(r.max_sparse_block == 15);
    CHECK(r.dense_block == binomial(3 + 3, 3));

    // Chained instance n=10, tau=2: sparse blocks strictly smaller than dense.
    int n = 10;
    std::vector<std::vector<int>> chain;
    for (int i = 0; i + 1 < n; ++i) chain.push_back({i, i + 1});
    CliqueDecomposition cdc = make_decomposition(n, chain);
    Polynomial fc(n, CoeffMode::exact);
    for (int i = 0; i + 1 < n; ++i)
        fc.add_term(Monomial::from_pairs({{i, 1}, {i + 1, 1}}), Coeff(Rational(1)));
    SparsePop popc = build_sparse_pop(fc, {}, cdc);
    SizeReport rc = size_report(popc, 1, 1);
    CHECK(rc.max_sparse_block < rc.dense_block);

    // p = 1 reduces the sparse report to the dense one.
    CliqueDecomposition cd1 = make_decomposition(3, {{0, 1, 2}});
    SparsePop pop1 = build_sparse_pop(f, {}, cd1);
    SizeReport r1 = size_report(pop1, 2, 2);
    CHECK(r1.rows.size() == 1);
    CHECK(r1.rows[0].gram_dim == r1.dense_block);
    CHECK(r1.max_sparse_block == r1.dense_block);
}

TEST_CASE("equality pair detection") {
    CliqueDecomposition cd = make_decomposition(3, {{0, 1}, {1, 2}});
    std::vector<Polynomial> g = {P("x2^3", 3), P("-x2^3", 3), P("x3", 3)};
    SparsePop pop = build_sparse_pop(P("x1*x2 + x2^2*x3", 3), g, cd);
    REQUIRE(pop.equality_pairs.size() == 1);
    CHECK(pop.equality_pairs[0] == std::pair<int, int>{0, 1});
    CHECK(pop.is_equality_member(0));
    CHECK(pop.is_equality_member(1));
    CHECK(!pop.is_equality_member(2));
    CHECK(pop.u[0] == 2);
    CHECK(pop.u[2] == 1);
}

TEST_CASE("user cliques are validated, not repaired") {
    CHECK_THROWS_AS(make_decomposition(4, {{0, 1}, {2, 3}, {0, 2}}), Error);
}
