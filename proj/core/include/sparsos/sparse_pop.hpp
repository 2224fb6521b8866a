#ifndef SPARSOS_SPARSE_POP_HPP
#define SPARSOS_SPARSE_POP_HPP

#include "sparsos/cliques.hpp"
#include "sparsos/polynomial.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sparsos {

// Objective split f = sum_l f_l: each monomial goes to the lowest-index
// clique covering its support. Throws when a monomial is uncovered.
std::vector<Polynomial> decompose_objective(const Polynomial& f,
                                            const CliqueDecomposition& cd);

// Constraint assignment J_l: each g_j goes to the lowest-index clique
// containing its support. Throws when some g_j fits no clique.
std::vector<std::vector<int>> assign_constraints(const std::vector<Polynomial>& g,
                                                 const CliqueDecomposition& cd);

// The per-clique denominator polynomials of the uniform-denominator
// certificates, all in the ambient variables, exact coefficients:
//   theta_l     = ||x(I_l)||^2 + 1
//   theta_hat_l = ||x(hat I_l)||^2 + 1
//   phi_l       = ||x(hat I_l)||^{2(1-delta_{l,1})} * prod_{j>l, s_j=l} ||x(hat I_j)||^2
//   d_l         = same product shape with theta_hat in place of ||.||^2
//   big_theta_l = theta_l * d_l        (degree 2*omega_l)
//   h_l         = ||x(I_l)||^2 * phi_l
struct DenominatorSet {
    std::vector<Polynomial> theta, theta_hat, phi, d, big_theta, h;
    std::vector<int> omega;
};

DenominatorSet build_denominators(const CliqueDecomposition& cd);

// A polynomial optimization problem with structured sparsity: objective,
// constraints g_j >= 0, clique decomposition, objective split, constraint
// assignment, and detected equality pairs (g_j, -g_j).
struct SparsePop {
    Polynomial f;
    std::vector<Polynomial> objective_parts; // f_l
    std::vector<Polynomial> g;
    std::vector<int> u;                           // ceil(deg g_j / 2)
    std::vector<std::vector<int>> clique_constraints; // J_l
    CliqueDecomposition cd;
    // Pairs (j, j') with g_{j'} == -g_j, merged into one free multiplier.
    std::vector<std::pair<int, int>> equality_pairs;

    int nvars() const { return f.nvars(); }
    bool is_equality_member(int j) const;
};

SparsePop build_sparse_pop(Polynomial f, std::vector<Polynomial> g,
                           CliqueDecomposition cd);

// Block-size accounting for the sparse and dense hierarchies at order k.
struct SizeReport {
    struct CliqueRow {
        int clique;
        int n_l;
        int omega_l;
        std::uint64_t gram_dim;   // C(n_l + d + k*omega_l, n_l)
        std::uint64_t gram_vars;  // gram_dim * (gram_dim+1) / 2
    };
    std::vector<CliqueRow> rows;
    std::uint64_t max_sparse_block = 0;
    std::uint64_t sparse_gram_vars = 0;
    std::uint64_t dense_block = 0; // C(n + d + k, n)
    std::uint64_t dense_gram_vars = 0;
    int k = 0, d = 0;
};

SizeReport size_report(const SparsePop& pop, int k, int d);
void print_size_report(std::ostream& os, const SizeReport& r);

} // namespace sparsos

#endif
