#include "sparsos/cliques.hpp"
#include "sparsos/error.hpp"

#include <algorithm>

namespace sparsos {

void VarGraph::add_edge(int a, int b) {
    if (a < 0 || b < 0 || a >= n || b >= n) throw Error("graph vertex out of range");
    if (a == b) return;
    adj[a].insert(b);
    adj[b].insert(a);
}

std::size_t VarGraph::edge_count() const {
    std::size_t c = 0;
    for (auto& s : adj) c += s.size();
    return c / 2;
}

VarGraph build_csp_graph(const Polynomial& f, const std::vector<Polynomial>& g) {
    VarGraph gr(f.nvars());
    for (auto& [m, c] : f.terms()) {
        const auto& ex = m.exponents();
        for (std::size_t i = 0; i < ex.size(); ++i)
            for (std::size_t j = i + 1; j < ex.size(); ++j)
                gr.add_edge(ex[i].first, ex[j].first);
    }
    for (auto& gj : g) {
        if (gj.nvars() != f.nvars()) throw Error("constraint nvars mismatch");
        std::set<int> supset = gj.support_vars();
        std::vector<int> sup(supset.begin(), supset.end());
        for (std::size_t i = 0; i < sup.size(); ++i)
            for (std::size_t j = i + 1; j < sup.size(); ++j) gr.add_edge(sup[i], sup[j]);
    }
    return gr;
}

int CliqueDecomposition::tau() const {
    int t = 0;
    for (auto& c : cliques) t = std::max<int>(t, static_cast<int>(c.size()));
    return t;
}

std::vector<int> CliqueDecomposition::children(int l) const {
    std::vector<int> out;
    for (int j = l + 1; j < p(); ++j)
        if (parents[j] == l) out.push_back(j);
    return out;
}

RipCheck check_rip(const std::vector<std::vector<int>>& cliques,
                   const std::vector<int>* parents) {
    RipCheck res;
    const int p = static_cast<int>(cliques.size());
    if (p == 0) return res;
    std::set<int> seen(cliques[0].begin(), cliques[0].end());
    res.parents.assign(p, -1);
    for (int l = 1; l < p; ++l) {
        std::vector<int> sep;
        for (int v : cliques[l])
            if (seen.count(v)) sep.push_back(v);
        int chosen = -1;
        if (parents) {
            int s = (*parents)[l];
            if (s >= 0 && s < l &&
                std::includes(cliques[s].begin(), cliques[s].end(), sep.begin(), sep.end()))
                chosen = s;
        } else {
            for (int s = 0; s < l; ++s) {
                if (std::includes(cliques[s].begin(), cliques[s].end(), sep.begin(),
                                  sep.end())) {
                    chosen = s;
                    break;
                }
            }
        }
        if (chosen < 0) {
            res.violator = l;
            return res;
        }
        res.parents[l] = chosen;
        seen.insert(cliques[l].begin(), cliques[l].end());
    }
    res.ok = true;
    return res;
}

CliqueDecomposition make_decomposition(int nvars, std::vector<std::vector<int>> cliques,
                                       const std::vector<int>* parents) {
    if (cliques.empty()) throw Error("empty clique list");
    for (auto& c : cliques) {
        if (c.empty()) throw Error("empty clique");
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
        if (c.front() < 0 || c.back() >= nvars) throw Error("clique variable out of range");
    }
    RipCheck rc = check_rip(cliques, parents);
    if (!rc.ok)
        throw Error("cliques violate the running intersection property at clique " +
                    std::to_string(rc.violator + 1));
    CliqueDecomposition cd;
    cd.nvars = nvars;
    cd.cliques = std::move(cliques);
    cd.parents = std::move(rc.parents);
    cd.separators.assign(cd.p(), {});
    std::set<int> seen(cd.cliques[0].begin(), cd.cliques[0].end());
    for (int l = 1; l < cd.p(); ++l) {
        for (int v : cd.cliques[l])
            if (seen.count(v)) cd.separators[l].push_back(v);
        seen.insert(cd.cliques[l].begin(), cd.cliques[l].end());
    }
    return cd;
}

namespace {

// Maximal cliques of a chordal graph from a perfect elimination ordering:
// C_v = {v} + higher-ordered neighbors; drop cliques contained in another.
std::vector<std::vector<int>> elimination_cliques(const VarGraph& g,
                                                  const std::vector<int>& order) {
    const int n = g.n;
    std::vector<int> pos(n);
    for (int i = 0; i < n; ++i) pos[order[i]] = i;
    std::vector<std::set<int>> cand;
    for (int i = 0; i < n; ++i) {
        int v = order[i];
        std::set<int> c{v};
        for (int u : g.adj[v])
            if (pos[u] > i) c.insert(u);
        cand.push_back(std::move(c));
    }
    std::vector<std::vector<int>> out;
    for (std::size_t i = 0; i < cand.size(); ++i) {
        bool maximal = true;
        for (std::size_t j = 0; j < cand.size() && maximal; ++j)
            if (i != j &&
                std::includes(cand[j].begin(), cand[j].end(), cand[i].begin(), cand[i].end()) &&
                (cand[j].size() > cand[i].size() || j < i))
                maximal = false;
        if (maximal) out.emplace_back(cand[i].begin(), cand[i].end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

CliqueDecomposition chordal_cliques(const VarGraph& graph) {
    const int n = graph.n;
    if (n == 0) throw Error("chordal_cliques: empty graph");

    // Minimum-degree elimination with fill-in; smallest index breaks ties.
    std::vector<std::set<int>> adj = graph.adj;
    std::vector<bool> gone(n, false);
    std::vector<int> order;
    VarGraph filled = graph;
    for (int step = 0; step < n; ++step) {
        int best = -1;
        std::size_t bestdeg = 0;
        for (int v = 0; v < n; ++v) {
            if (gone[v]) continue;
            if (best < 0 || adj[v].size() < bestdeg) {
                best = v;
                bestdeg = adj[v].size();
            }
        }
        order.push_back(best);
        gone[best] = true;
        std::vector<int> nb(adj[best].begin(), adj[best].end());
        for (std::size_t i = 0; i < nb.size(); ++i)
            for (std::size_t j = i + 1; j < nb.size(); ++j) {
                adj[nb[i]].insert(nb[j]);
                adj[nb[j]].insert(nb[i]);
                filled.add_edge(nb[i], nb[j]);
            }
        for (int u : nb) adj[u].erase(best);
        adj[best].clear();
    }

    std::vector<std::vector<int>> cliques = elimination_cliques(filled, order);
    const int p = static_cast<int>(cliques.size());

    // Maximum-weight spanning tree on clique intersections (Prim, smallest
    // index on ties), then a preorder walk: the junction-tree property makes
    // the resulting order satisfy RIP with the tree parent as s_l.
    std::vector<bool> used(p, false);
    std::vector<int> treeparent(p, -1);
    std::vector<std::vector<int>> childlist(p);
    used[0] = true;
    for (int it = 1; it < p; ++it) {
        int bi = -1, bj = -1, bw = -1;
        for (int i = 0; i < p; ++i) {
            if (!used[i]) continue;
            for (int j = 0; j < p; ++j) {
                if (used[j]) continue;
                std::vector<int> inter;
                std::set_intersection(cliques[i].begin(), cliques[i].end(),
                                      cliques[j].begin(), cliques[j].end(),
                                      std::back_inserter(inter));
                int w = static_cast<int>(inter.size());
                if (w > bw || (w == bw && (bj < 0 || j < bj || (j == bj && i < bi)))) {
                    bw = w;
                    bi = i;
                    bj = j;
                }
            }
        }
        used[bj] = true;
        treeparent[bj] = bi;
        childlist[bi].push_back(bj);
    }

    for (auto& ch : childlist) std::sort(ch.begin(), ch.end());

    std::vector<std::vector<int>> ordered;
    std::vector<int> stack{0};
    std::vector<int> mapped(p, -1);
    std::vector<int> parents;
    while (!stack.empty()) {
        int c = stack.back();
        stack.pop_back();
        mapped[c] = static_cast<int>(ordered.size());
        ordered.push_back(cliques[c]);
        parents.push_back(treeparent[c] < 0 ? -1 : mapped[treeparent[c]]);
        auto& ch = childlist[c];
        for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
    }
    return make_decomposition(n, std::move(ordered), &parents);
}

} // namespace sparsos
