#pragma once

#include <map>
#include <numeric>

#include "isoltest/lts.hpp"

namespace isoltest {

enum class Relation { strong, branching, weak_trace };

inline Relation relation_from_string(const std::string& s) {
    if (s == "strong") return Relation::strong;
    if (s == "branching") return Relation::branching;
    if (s == "weak-trace" || s == "weaktrace") return Relation::weak_trace;
    throw std::invalid_argument("unknown relation: " + s);
}

namespace detail {

// Signature-based refinement for strong bisimulation: split by the set of
// (label, target block) pairs until stable.
inline std::vector<int> strong_partition(const Lts& l) {
    const int n = l.num_states();
    std::vector<int> block(n, 0);
    auto out = l.outgoing();
    int n_blocks = 1;
    for (;;) {
        std::map<std::pair<int, std::vector<std::pair<int, int>>>, int> sig_index;
        std::vector<int> next(n);
        for (int s = 0; s < n; ++s) {
            std::vector<std::pair<int, int>> sig;
            for (const auto& t : out[s]) sig.push_back({t.label, block[t.to]});
            std::sort(sig.begin(), sig.end());
            sig.erase(std::unique(sig.begin(), sig.end()), sig.end());
            auto key = std::make_pair(block[s], std::move(sig));
            auto [it, fresh] = sig_index.emplace(std::move(key),
                                                 static_cast<int>(sig_index.size()));
            next[s] = it->second;
        }
        int count = static_cast<int>(sig_index.size());
        block.swap(next);
        if (count == n_blocks) return block;
        n_blocks = count;
    }
}

// Tarjan-free SCC collapse of the tau graph. States on a tau cycle are
// branching bisimilar (divergence-blind), so they share a representative.
inline std::vector<int> tau_scc_map(const Lts& l) {
    const int n = l.num_states();
    std::vector<std::vector<int>> tau_out(n);
    for (const auto& t : l.transitions())
        if (t.label == Lts::kTau) tau_out[t.from].push_back(t.to);

    // Iterative Tarjan.
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<int> stack, on_stack(n, 0);
    int next_index = 0, n_comps = 0;
    struct Frame { int v; size_t child; };
    for (int root = 0; root < n; ++root) {
        if (index[root] >= 0) continue;
        std::vector<Frame> frames{{root, 0}};
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!frames.empty()) {
            auto& fr = frames.back();
            if (fr.child < tau_out[fr.v].size()) {
                int w = tau_out[fr.v][fr.child++];
                if (index[w] < 0) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[fr.v] = std::min(low[fr.v], index[w]);
                }
            } else {
                if (low[fr.v] == index[fr.v]) {
                    for (;;) {
                        int w = stack.back();
                        stack.pop_back();
                        on_stack[w] = 0;
                        comp[w] = n_comps;
                        if (w == fr.v) break;
                    }
                    ++n_comps;
                }
                int v = fr.v;
                frames.pop_back();
                if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
            }
        }
    }
    return comp;
}

// Signature refinement for (divergence-blind) branching bisimulation, after
// collapsing tau SCCs. A state's signature is the set of (label, target
// block) pairs reachable through inert tau steps, where a tau step inside
// the state's own block is itself inert and contributes nothing.
inline std::vector<int> branching_partition(const Lts& l) {
    const int n0 = l.num_states();
    std::vector<int> scc = tau_scc_map(l);
    int n = 0;
    for (int c : scc) n = std::max(n, c + 1);

    // Condensed edges.
    std::vector<std::vector<std::pair<int, int>>> out(n);  // (label, to)
    for (const auto& t : l.transitions()) {
        int a = scc[t.from], b = scc[t.to];
        if (t.label == Lts::kTau && a == b) continue;
        out[a].push_back({t.label, b});
    }
    for (auto& v : out) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }

    // Topological order of the (acyclic) condensed tau graph, so inert
    // signatures can be accumulated bottom-up in one sweep per round.
    std::vector<std::vector<int>> tau_out(n);
    std::vector<int> indeg(n, 0);
    for (int s = 0; s < n; ++s)
        for (auto& [lab, to] : out[s])
            if (lab == Lts::kTau) { tau_out[s].push_back(to); ++indeg[to]; }
    std::vector<int> topo;
    for (int s = 0; s < n; ++s)
        if (indeg[s] == 0) topo.push_back(s);
    for (size_t i = 0; i < topo.size(); ++i)
        for (int to : tau_out[topo[i]])
            if (--indeg[to] == 0) topo.push_back(to);

    std::vector<int> block(n, 0);
    int n_blocks = 1;
    for (;;) {
        std::vector<std::vector<std::pair<int, int>>> sig(n);
        for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
            int s = *it;
            for (auto& [lab, to] : out[s]) {
                if (lab == Lts::kTau && block[to] == block[s]) {
                    // Inert step: inherit the target's signature.
                    sig[s].insert(sig[s].end(), sig[to].begin(), sig[to].end());
                } else {
                    sig[s].push_back({lab, block[to]});
                }
            }
            std::sort(sig[s].begin(), sig[s].end());
            sig[s].erase(std::unique(sig[s].begin(), sig[s].end()), sig[s].end());
        }
        std::map<std::pair<int, std::vector<std::pair<int, int>>>, int> sig_index;
        std::vector<int> next(n);
        for (int s = 0; s < n; ++s) {
            auto key = std::make_pair(block[s], std::move(sig[s]));
            auto [it2, fresh] = sig_index.emplace(std::move(key),
                                                  static_cast<int>(sig_index.size()));
            next[s] = it2->second;
        }
        int count = static_cast<int>(sig_index.size());
        block.swap(next);
        if (count == n_blocks) break;
        n_blocks = count;
    }

    std::vector<int> result(n0);
    for (int s = 0; s < n0; ++s) result[s] = block[scc[s]];
    return result;
}

}  // namespace detail

// Stable partition of states into equivalence classes under the relation.
// Weak-trace equivalence has no canonical partition; only strong and
// branching are supported here.
inline std::vector<int> bisimulation_partition(const Lts& l, Relation r) {
    switch (r) {
        case Relation::strong: return detail::strong_partition(l);
        case Relation::branching: return detail::branching_partition(l);
        default:
            throw std::invalid_argument("no state partition for weak-trace equivalence");
    }
}

// Quotient by a partition; for the branching relation, tau transitions that
// stay inside a block are inert and dropped.
inline Lts quotient(const Lts& l, const std::vector<int>& block, Relation r) {
    int n_blocks = 0;
    for (int b : block) n_blocks = std::max(n_blocks, b + 1);
    Lts q(n_blocks, block[l.initial()]);
    for (const auto& t : l.transitions()) {
        if (r == Relation::branching && t.label == Lts::kTau &&
            block[t.from] == block[t.to])
            continue;
        q.add_transition(block[t.from], l.label(t.label), block[t.to]);
    }
    q.dedupe();
    return restrict_reachable(q);
}

inline Lts minimize(const Lts& l, Relation r) {
    Lts reachable = restrict_reachable(l);
    return quotient(reachable, bisimulation_partition(reachable, r), r);
}

}  // namespace isoltest
