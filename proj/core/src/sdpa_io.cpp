#include "sparsos/sdp.hpp"
#include "sparsos/error.hpp"
#include "sparsos/rational.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sparsos {

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

// Layout: the nb PSD blocks, then (when free variables are present) a pair of
// diagonal blocks of size nfree holding u = u+ - u-.
std::string sdpa_text(const SdpInstance& inst) {
    inst.validate();
    std::ostringstream os;
    os << inst.m() << "\n";
    int nblocks = inst.nblocks() + (inst.nfree > 0 ? 2 : 0);
    os << nblocks << "\n";
    for (int i = 0; i < inst.nblocks(); ++i)
        os << inst.block_sizes[i] << (i + 1 < nblocks ? " " : "");
    if (inst.nfree > 0) os << -inst.nfree << " " << -inst.nfree;
    os << "\n";
    for (int i = 0; i < inst.m(); ++i) os << (i ? " " : "") << fmt17(inst.b[i]);
    os << "\n";

    const int pos_blk = inst.nblocks() + 1;
    const int neg_blk = inst.nblocks() + 2;
    auto emit = [&](int matno, const std::vector<SdpInstance::Entry>& psd,
                    const std::vector<std::pair<int, double>>& fr) {
        for (auto& e : psd) {
            if (e.value == 0.0) continue;
            os << matno << " " << e.block + 1 << " " << e.row + 1 << " " << e.col + 1
               << " " << fmt17(e.value) << "\n";
        }
        for (auto& [idx, v] : fr) {
            if (v == 0.0) continue;
            os << matno << " " << pos_blk << " " << idx + 1 << " " << idx + 1 << " "
               << fmt17(v) << "\n";
            os << matno << " " << neg_blk << " " << idx + 1 << " " << idx + 1 << " "
               << fmt17(-v) << "\n";
        }
    };
    {
        std::vector<std::pair<int, double>> cfree;
        for (int j = 0; j < inst.nfree; ++j)
            if (inst.c_free[j] != 0.0) cfree.emplace_back(j, inst.c_free[j]);
        emit(0, inst.c_psd, cfree);
    }
    for (int i = 0; i < inst.m(); ++i)
        emit(i + 1, inst.constraints[i].psd, inst.constraints[i].free_terms);
    return os.str();
}

void export_sdpa(const SdpInstance& inst, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << sdpa_text(inst);
    if (!out) throw Error("write failure on '" + path + "'");
}

namespace {

// Pulls every numeric token out of a brace/comma-formatted section.
struct NumberReader {
    std::istream& in;
    int line = 1;
    explicit NumberReader(std::istream& s) : in(s) {}

    // Reads chars until a full number is assembled; stops at section ends.
    bool next(double& out) {
        std::string tok;
        int c;
        while ((c = in.get()) != EOF) {
            char ch = static_cast<char>(c);
            if (ch == '\n') ++line;
            if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '+' || ch == '-' ||
                ch == '.' || ch == 'e' || ch == 'E') {
                tok.push_back(ch);
            } else if (!tok.empty()) {
                break;
            } else if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '=') {
                in.unget();
                return false; // start of the next section header
            }
        }
        if (tok.empty()) return false;
        try {
            out = std::stod(tok);
        } catch (const std::exception&) {
            throw ParseError("malformed number '" + tok + "'", line);
        }
        return true;
    }
};

} // namespace

SdpSolution import_solution(const SdpInstance& inst, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");

    // Sections of interest: xVec (multipliers y), xMat (slack Z side),
    // yMat (certificate X side). Everything else is ignored.
    std::vector<double> xvec;
    std::vector<double> xmat, ymat;
    int xmat_line = 1, ymat_line = 1;
    std::string word;
    int line = 1;
    auto read_section = [&](std::vector<double>& dst) {
        NumberReader nr(in);
        nr.line = line;
        double v;
        while (nr.next(v)) dst.push_back(v);
        line = nr.line;
        return line;
    };
    while (in >> word) {
        for (char ch : word)
            if (ch == '\n') ++line;
        if (word == "xVec") {
            in >> word; // '='
            read_section(xvec);
        } else if (word == "xMat") {
            in >> word;
            xmat_line = read_section(xmat);
        } else if (word == "yMat") {
            in >> word;
            ymat_line = read_section(ymat);
        }
    }
    if (static_cast<int>(xvec.size()) != inst.m())
        throw ParseError("xVec has " + std::to_string(xvec.size()) + " entries, expected " +
                         std::to_string(inst.m()), line);

    // Expected numbers per full block-diagonal matrix (dense blocks, diagonal
    // free blocks written as plain diagonals by SDPA).
    std::size_t expected = 0;
    for (int s : inst.block_sizes) expected += static_cast<std::size_t>(s) * s;
    std::size_t free_part = 2 * static_cast<std::size_t>(inst.nfree);
    expected += free_part;
    auto unpack = [&](const std::vector<double>& flat, const char* name, int end_line,
                      std::vector<Eigen::MatrixXd>& blocks, std::vector<double>* diag_pos,
                      std::vector<double>* diag_neg) {
        if (flat.size() != expected)
            throw ParseError(std::string(name) + " has " + std::to_string(flat.size()) +
                             " numbers, expected " + std::to_string(expected) +
                             " (wrong block structure)", end_line);
        std::size_t at = 0;
        blocks.clear();
        for (int s : inst.block_sizes) {
            Eigen::MatrixXd B(s, s);
            for (int r = 0; r < s; ++r)
                for (int c = 0; c < s; ++c) B(r, c) = flat[at++];
            blocks.push_back(0.5 * (B + B.transpose()));
        }
        if (inst.nfree > 0) {
            diag_pos->assign(flat.begin() + at, flat.begin() + at + inst.nfree);
            at += inst.nfree;
            diag_neg->assign(flat.begin() + at, flat.begin() + at + inst.nfree);
        }
    };

    SdpSolution sol;
    std::vector<double> up, un, zp, zn;
    unpack(ymat, "yMat", ymat_line, sol.X, &up, &un);
    unpack(xmat, "xMat", xmat_line, sol.Z, &zp, &zn);
    sol.y = xvec;
    sol.u.resize(inst.nfree);
    for (int j = 0; j < inst.nfree; ++j) sol.u[j] = up[j] - un[j];

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
    sol.status = std::max({r.primal, r.dual, r.gap}) < 1e-7 ? SdpStatus::optimal
                                                            : SdpStatus::max_iter;
    return sol;
}

} // namespace sparsos
