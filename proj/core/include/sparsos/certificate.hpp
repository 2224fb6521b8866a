#ifndef SPARSOS_CERTIFICATE_HPP
#define SPARSOS_CERTIFICATE_HPP

#include "sparsos/relaxation.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sparsos {

// One realized Gram block: sigma = basis' * G * basis, stored dense
// row-major in the certificate's coefficient mode.
struct CertGram {
    int clique = 0;
    int constraint = -1; // -1: sigma_0 / Reznick sigma
    std::vector<Monomial> basis;
    std::vector<Coeff> entries; // size n*n, symmetric

    int n() const { return static_cast<int>(basis.size()); }
    const Coeff& at(int r, int c) const { return entries[r * n() + c]; }
    Coeff& at(int r, int c) { return entries[r * n() + c]; }
};

struct CertFree {
    FreeKind kind = FreeKind::transfer;
    int clique = -1;
    int constraint = -1;
    Polynomial poly;
};

// A verifiable sparse positivity certificate. Problem data (objective,
// constraints, cliques, epsilon) is embedded exactly; certificate values
// (Gram blocks, lambda, transfer and free multipliers) carry the
// certificate's coefficient mode. Denominators are never stored: verifiers
// re-derive theta/BigTheta/H from the clique data.
struct SparseCertificate {
    RelaxMode mode = RelaxMode::pv_global;
    Formulation form = Formulation::A;
    CoeffMode cmode = CoeffMode::floating;
    int nvars = 0;
    int k = 0, d = 0;
    Rational eps = 0;
    std::optional<Coeff> lambda;

    Polynomial objective;              // exact
    std::vector<Polynomial> constraints; // exact
    CliqueDecomposition cd;
    std::vector<Polynomial> reznick_parts; // homogeneous mode: p_l (exact)
    std::vector<int> reznick_kl;

    std::vector<CertGram> grams;
    std::vector<CertFree> frees;
};

struct VerifyReport {
    bool pass = false;
    double max_residual = 0; // max |coefficient| of the identity residual
    double min_eigenvalue = 0;
    std::string detail;                // human-readable findings
    Polynomial exact_residual;         // exact mode only
};

struct RoundingResult {
    bool ok = false;
    SparseCertificate cert;
    std::string failure;
};

// Reads Gram blocks, lambda and free polynomials out of a solved relaxation.
// Grams are symmetrized; nothing is clipped.
SparseCertificate extract(const RelaxationProblem& rp, const SdpSolution& sol);

// Reconstructs both sides of the certificate identity in floating point.
// PASS iff max coefficient residual < tol and min Gram eigenvalue > -tol.
VerifyReport verify_float(const SparseCertificate& cert, double tol);

// Expands the identity in exact rationals (residual must vanish identically)
// and checks PSD by pivoted LDL^T: PSD iff all pivots >= 0 and no nonzero
// row survives a zero pivot.
VerifyReport verify_exact(const SparseCertificate& cert);

// Rounds every certificate value to rationals (denominator <= max_den), then
// projects onto the affine constraint set via the exact least-squares
// correction so the identity holds exactly; PSD is re-checked exactly.
// Failure (an indefinite Gram after projection, or an intractably large
// projection system) is a result, not an exception.
RoundingResult round_to_rational(const SparseCertificate& cert, const Integer& max_den);

std::string certificate_text(const SparseCertificate& cert);
void write_certificate(const SparseCertificate& cert, const std::string& path);
SparseCertificate read_certificate(const std::string& path);
SparseCertificate parse_certificate(std::istream& in);

// Exact PSD test for a symmetric rational matrix (pivoted LDL^T).
bool psd_exact(const std::vector<Rational>& dense, int n);

} // namespace sparsos

#endif
