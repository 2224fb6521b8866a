#include "sparsos/sdp.hpp"
#include "sparsos/error.hpp"

#include <cmath>

namespace sparsos {

int SdpInstance::total_psd_dim() const {
    int t = 0;
    for (int s : block_sizes) t += s;
    return t;
}

std::string to_string(SdpStatus s) {
    switch (s) {
        case SdpStatus::optimal: return "optimal";
        case SdpStatus::infeasible: return "infeasible";
        case SdpStatus::unbounded: return "unbounded";
        case SdpStatus::max_iter: return "max-iter";
    }
    return "?";
}

namespace {

void check_entry(const SdpInstance& inst, const SdpInstance::Entry& e) {
    if (e.block < 0 || e.block >= inst.nblocks()) throw Error("sdp: block index out of range");
    int s = inst.block_sizes[e.block];
    if (e.row < 0 || e.col < 0 || e.row >= s || e.col >= s) throw Error("sdp: entry index out of range");
    if (e.row > e.col) throw Error("sdp: entries must satisfy row <= col");
    if (!std::isfinite(e.value)) throw Error("sdp: non-finite entry");
}

} // namespace

void SdpInstance::validate() const {
    for (int s : block_sizes)
        if (s <= 0) throw Error("sdp: nonpositive block size");
    if (b.size() != constraints.size()) throw Error("sdp: b length mismatch");
    if (static_cast<int>(c_free.size()) != nfree) throw Error("sdp: c_free length mismatch");
    for (double v : b)
        if (!std::isfinite(v)) throw Error("sdp: non-finite right-hand side");
    for (auto& e : c_psd) check_entry(*this, e);
    for (auto& con : constraints) {
        for (auto& e : con.psd) check_entry(*this, e);
        for (auto& [idx, v] : con.free_terms) {
            if (idx < 0 || idx >= nfree) throw Error("sdp: free index out of range");
            if (!std::isfinite(v)) throw Error("sdp: non-finite coefficient");
        }
    }
}

Residuals residuals(const SdpInstance& inst, const SdpSolution& sol) {
    if (static_cast<int>(sol.X.size()) != inst.nblocks() ||
        static_cast<int>(sol.Z.size()) != inst.nblocks() ||
        static_cast<int>(sol.y.size()) != inst.m() ||
        static_cast<int>(sol.u.size()) != inst.nfree)
        throw Error("residuals: solution dimensions do not match instance");
    for (int bidx = 0; bidx < inst.nblocks(); ++bidx) {
        if (sol.X[bidx].rows() != inst.block_sizes[bidx] ||
            sol.Z[bidx].rows() != inst.block_sizes[bidx])
            throw Error("residuals: block dimension mismatch");
    }

    Residuals r;
    auto dot_entries = [&](const std::vector<SdpInstance::Entry>& es,
                           const std::vector<Eigen::MatrixXd>& mats) {
        double acc = 0;
        for (auto& e : es)
            acc += e.value * mats[e.block](e.row, e.col) * (e.row == e.col ? 1.0 : 2.0);
        return acc;
    };

    // Primal residual: A(X) + F u - b.
    for (int i = 0; i < inst.m(); ++i) {
        double ax = dot_entries(inst.constraints[i].psd, sol.X);
        for (auto& [idx, v] : inst.constraints[i].free_terms) ax += v * sol.u[idx];
        r.primal = std::max(r.primal, std::fabs(ax - inst.b[i]));
    }

    // Dual residual: A*(y) - C - Z on PSD blocks, F'y - c_free on free rows.
    std::vector<Eigen::MatrixXd> D(inst.nblocks());
    for (int bidx = 0; bidx < inst.nblocks(); ++bidx)
        D[bidx] = -sol.Z[bidx];
    auto add_sym = [&](const SdpInstance::Entry& e, double scale) {
        D[e.block](e.row, e.col) += scale * e.value;
        if (e.row != e.col) D[e.block](e.col, e.row) += scale * e.value;
    };
    for (auto& e : inst.c_psd) add_sym(e, -1.0);
    for (int i = 0; i < inst.m(); ++i)
        for (auto& e : inst.constraints[i].psd) add_sym(e, sol.y[i]);
    for (auto& Db : D) r.dual = std::max(r.dual, Db.cwiseAbs().maxCoeff());
    std::vector<double> fty(inst.nfree, 0.0);
    for (int i = 0; i < inst.m(); ++i)
        for (auto& [idx, v] : inst.constraints[i].free_terms) fty[idx] += v * sol.y[i];
    for (int j = 0; j < inst.nfree; ++j)
        r.dual = std::max(r.dual, std::fabs(fty[j] - inst.c_free[j]));

    double pobj = dot_entries(inst.c_psd, sol.X);
    for (int j = 0; j < inst.nfree; ++j) pobj += inst.c_free[j] * sol.u[j];
    double dobj = 0;
    for (int i = 0; i < inst.m(); ++i) dobj += inst.b[i] * sol.y[i];
    r.gap = std::fabs(pobj - dobj);
    return r;
}

} // namespace sparsos
