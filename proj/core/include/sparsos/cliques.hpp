#ifndef SPARSOS_CLIQUES_HPP
#define SPARSOS_CLIQUES_HPP

#include "sparsos/polynomial.hpp"

#include <set>
#include <vector>

namespace sparsos {

// Undirected graph on variable indices 0..n-1.
struct VarGraph {
    int n = 0;
    std::vector<std::set<int>> adj;

    explicit VarGraph(int n_ = 0) : n(n_), adj(n_) {}
    void add_edge(int a, int b);
    bool has_edge(int a, int b) const { return a != b && adj[a].count(b) > 0; }
    std::size_t edge_count() const;
};

// Correlative sparsity graph: vertices are variables, with an edge whenever
// two variables share a monomial of f or both occur in some g_j.
VarGraph build_csp_graph(const Polynomial& f, const std::vector<Polynomial>& g);

// Ordered variable cliques I_1..I_p with parents s_l and separators
// hat(I)_l = I_l \cap (I_1 \cup ... \cup I_{l-1}).
struct CliqueDecomposition {
    int nvars = 0;
    std::vector<std::vector<int>> cliques;    // each sorted ascending
    std::vector<int> parents;                 // parents[0] = -1; for l>=1, s_l < l
    std::vector<std::vector<int>> separators; // separators[0] = {}

    int p() const { return static_cast<int>(cliques.size()); }
    int n_l(int l) const { return static_cast<int>(cliques[l].size()); }
    int nhat_l(int l) const { return static_cast<int>(separators[l].size()); }
    int tau() const;
    // Cliques whose parent is l (the children in the clique tree).
    std::vector<int> children(int l) const;
};

struct RipCheck {
    bool ok = false;
    std::vector<int> parents; // valid when ok
    int violator = -1;        // first l (0-based) whose separator fits no earlier clique
};

// Verifies the running intersection property for an ordered clique list.
// When parents are supplied they are validated; otherwise the smallest valid
// parent index is chosen per clique.
RipCheck check_rip(const std::vector<std::vector<int>>& cliques,
                   const std::vector<int>* parents = nullptr);

// Builds a CliqueDecomposition from an ordered clique list (validates RIP).
CliqueDecomposition make_decomposition(int nvars, std::vector<std::vector<int>> cliques,
                                       const std::vector<int>* parents = nullptr);

// Chordal extension via minimum-degree elimination, then maximal cliques of
// the extension ordered along a clique tree so that RIP always holds.
CliqueDecomposition chordal_cliques(const VarGraph& graph);

} // namespace sparsos

#endif
