#ifndef SPARSOS_RELAXATION_HPP
#define SPARSOS_RELAXATION_HPP

#include "sparsos/sdp.hpp"
#include "sparsos/sparse_pop.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sparsos {

enum class RelaxMode { homogeneous_reznick, pv_global, pv_constrained, dense_putinar };
enum class Formulation { A, B };

std::string to_string(RelaxMode m);
std::string to_string(Formulation f);
RelaxMode relax_mode_from_string(const std::string& s);
Formulation formulation_from_string(const std::string& s);

// One PSD Gram block: contributes v' G v * mult to its constraint group.
struct GramBlock {
    int clique = 0;
    int constraint = -1; // -1: sigma_0 / Reznick sigma; else index into pop.g
    std::vector<Monomial> basis;
    int group = 0;
    Polynomial mult;
};

enum class FreeKind { lambda, transfer, eq_multiplier };

// Free polynomial variables: one scalar per listed monomial, each scalar
// contributing mono * mult to the named groups.
struct FreeBlock {
    FreeKind kind = FreeKind::lambda;
    int clique = -1;
    int constraint = -1; // eq_multiplier: index of the pair's positive member
    std::vector<Monomial> monos;
    std::vector<std::pair<int, Polynomial>> mults;
};

// Coefficient-matching program: for every constraint group q,
//   sum_gram (v'Gv)*mult + sum_free (free poly)*mult + [lambda term] = rhs[q]
// as an identity of polynomials, with every Gram PSD and lambda maximized.
struct RelaxationProblem {
    RelaxMode mode = RelaxMode::pv_global;
    Formulation form = Formulation::A;
    int k = 0, d = 0;
    Rational eps = 0;
    std::optional<Rational> lambda_fixed;
    bool has_lambda = false;

    SparsePop pop;
    DenominatorSet dens;
    std::vector<int> reznick_kl; // homogeneous mode only

    int ngroups = 1;
    std::vector<Polynomial> rhs;
    std::vector<GramBlock> grams;
    std::vector<FreeBlock> frees;
    std::vector<std::string> warnings;

    int free_slot_count() const;
};

// Positive definite rational form given as sum_l p_l / ||x(I_l)||^{2 k_l}
// with p_l homogeneous of degree 2(d + k_l) supported in clique l.
struct RationalFormSum {
    std::vector<Polynomial> p;
    std::vector<int> kl;
    int d = 0;
};

// f = sum sigma_l / (||x(I_l)||^{2k} Phi_l^k), cleared with the global
// product; sigma bases contain only monomials of exact degree
// d + k(1 + deg(Phi_l)/2).
RelaxationProblem build_homogeneous_reznick(const RationalFormSum& input,
                                            const CliqueDecomposition& cd, int k);

// f - lambda + eps * sum theta_l^d = sum sigma_l / BigTheta_l^k.
RelaxationProblem build_pv_global(const SparsePop& pop, const Rational& eps, int d, int k,
                                  Formulation form,
                                  std::optional<Rational> lambda_fixed = std::nullopt);

// f - lambda + eps * sum theta_l^d
//   = sum (sigma_{0,l} + sum_{j in J_l} sigma_{j,l} g_j) / BigTheta_l^k,
// with equality pairs (g, -g) merged into free multipliers.
RelaxationProblem build_pv_constrained(const SparsePop& pop, const Rational& eps, int d,
                                       int k, Formulation form,
                                       std::optional<Rational> lambda_fixed = std::nullopt);

// Dense baseline: f - lambda = sigma_0 + sum sigma_j g_j, deg(sigma_j g_j) <= 2k.
RelaxationProblem build_dense_putinar(const Polynomial& f, const std::vector<Polynomial>& g,
                                      int k,
                                      std::optional<Rational> lambda_fixed = std::nullopt);

struct SdpLift {
    SdpInstance inst;
    // Row labels: (group, monomial) in deterministic order.
    std::vector<std::pair<int, Monomial>> rows;
};

SdpLift lift_to_sdp(const RelaxationProblem& rp);

// Default relaxation degree d per mode (the stated preconditions).
int default_degree(RelaxMode mode, const Polynomial& f);

} // namespace sparsos

#endif
