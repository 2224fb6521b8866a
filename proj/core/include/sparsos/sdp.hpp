#ifndef SPARSOS_SDP_HPP
#define SPARSOS_SDP_HPP

#include <Eigen/Dense>

#include <string>
#include <tuple>
#include <vector>

namespace sparsos {

// Block-diagonal semidefinite program in standard equality form.
//
// Variables: PSD blocks X_b and a vector u of free scalars.
//   maximize   <C, X> + c_free' u
//   subject to <A_i, X> + f_i' u = b_i   (i = 1..m),   X_b >= 0.
//
// The same data read from the other side (the form written to SDPA files
// with F_0 = C, F_i = A_i, c = b):
//   minimize   b' y   subject to   sum_i y_i A_i - C >= 0,  F' y = c_free.
//
// Entries are stored once per unordered pair (row <= col); the matrices are
// symmetric by construction.
struct SdpInstance {
    struct Entry {
        int block;
        int row, col; // row <= col
        double value;
    };
    struct Constraint {
        std::vector<Entry> psd;
        std::vector<std::pair<int, double>> free_terms; // (free index, coeff)
    };

    std::vector<int> block_sizes; // PSD blocks
    int nfree = 0;
    std::vector<Constraint> constraints;
    std::vector<double> b;
    std::vector<Entry> c_psd;
    std::vector<double> c_free;

    int m() const { return static_cast<int>(constraints.size()); }
    int nblocks() const { return static_cast<int>(block_sizes.size()); }
    int total_psd_dim() const;
    void validate() const; // throws Error on inconsistent data
};

enum class SdpStatus { optimal, infeasible, unbounded, max_iter };
std::string to_string(SdpStatus s);

struct SdpSolution {
    SdpStatus status = SdpStatus::max_iter;
    std::vector<Eigen::MatrixXd> X; // PSD blocks (certificate side)
    std::vector<double> u;          // free variables
    std::vector<double> y;          // constraint multipliers
    std::vector<Eigen::MatrixXd> Z; // slack blocks
    double primal_obj = 0, dual_obj = 0;
    double primal_res = 0, dual_res = 0, gap = 0;
    int iterations = 0;
};

struct Residuals {
    double primal = 0; // ||A(X) + F u - b||_inf
    double dual = 0;   // max entry violation of A*(y) - C - Z and |F'y - c_free|
    double gap = 0;    // |<C,X> + c_free'u - b'y|
};

// Recomputed from the returned values, never trusted from solver internals.
Residuals residuals(const SdpInstance& inst, const SdpSolution& sol);

struct SolveOptions {
    double tol = 1e-8;
    int max_iter = 100;
    double ray_threshold = 1e8; // iterate-norm threshold for ray detection
    bool trace = false;         // per-iteration diagnostics on stderr
    // Final alternating-projection refinement of the certificate side.
    // Lowers coefficient residuals to roundoff but moves the point onto the
    // PSD boundary; disable when an interior point is wanted (rational
    // rounding pipelines).
    bool polish = true;
};

// Primal-dual interior-point method with Nesterov-Todd scaling and a
// Mehrotra-style predictor-corrector. Deterministic for fixed inputs.
SdpSolution solve(const SdpInstance& inst, const SolveOptions& opts = {});

// SDPA sparse format (.dat-s). Free variables are written as a pair of
// diagonal blocks (u = u+ - u-), appended after the PSD blocks.
void export_sdpa(const SdpInstance& inst, const std::string& path);
std::string sdpa_text(const SdpInstance& inst);

// Parses an SDPA-style result file (xVec / xMat / yMat sections) against the
// instance layout and recomputes residuals.
SdpSolution import_solution(const SdpInstance& inst, const std::string& path);

} // namespace sparsos

#endif
