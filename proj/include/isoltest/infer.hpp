#pragma once

#include <optional>
#include <random>

#include "isoltest/constraint.hpp"

namespace isoltest {

// ---- Verification intents ------------------------------------------------

struct ViHandle {
    std::string name;
    int action = -1;
    std::vector<ConstraintExpr> constraints;  // conjoined onto the matched instance
};

struct ActivityNode {
    enum class Kind { leaf, sequence, select, schedule } kind = Kind::leaf;
    int handle = -1;  // for leaf
    std::vector<ActivityNode> children;

    static ActivityNode leaf(int handle) {
        ActivityNode n;
        n.handle = handle;
        return n;
    }
    static ActivityNode node(Kind k, std::vector<ActivityNode> cs) {
        ActivityNode n;
        n.kind = k;
        n.children = std::move(cs);
        return n;
    }
};

struct VerificationIntent {
    std::string name;
    std::vector<ViHandle> handles;
    ActivityNode activity;
    std::vector<std::pair<int, int>> binds;  // output of .first feeds input of .second

    int handle_index(const std::string& n) const {
        for (size_t i = 0; i < handles.size(); ++i)
            if (handles[i].name == n) return static_cast<int>(i);
        return -1;
    }
};

// Checks that the bind edges form no cycle.
inline void validate_binds(const VerificationIntent& vi) {
    std::map<int, std::vector<int>> adj;
    for (auto& [a, b] : vi.binds) adj[a].push_back(b);
    std::map<int, int> mark;  // 0 unseen, 1 in progress, 2 done
    std::function<void(int)> visit = [&](int h) {
        mark[h] = 1;
        for (int next : adj[h]) {
            if (mark[next] == 1)
                throw std::invalid_argument("bind cycle through handle " +
                                            vi.handles[next].name);
            if (mark[next] == 0) visit(next);
        }
        mark[h] = 2;
    };
    for (auto& [a, b] : vi.binds)
        if (mark[a] == 0) visit(a);
}

namespace detail {

// Epsilon-free NFA over handle indices tracking progress through the
// activity tree. Schedule branches are shuffled by a product construction.
struct ObligationNfa {
    int n_states = 0;
    int start = 0;
    std::set<int> finals;
    std::vector<std::tuple<int, int, int>> edges;  // (from, handle, to)
};

inline ObligationNfa compile_activity(const ActivityNode& node) {
    using Kind = ActivityNode::Kind;
    switch (node.kind) {
        case Kind::leaf: {
            ObligationNfa n;
            n.n_states = 2;
            n.finals = {1};
            n.edges = {{0, node.handle, 1}};
            return n;
        }
        case Kind::sequence: {
            if (node.children.empty()) {
                ObligationNfa n;
                n.n_states = 1;
                n.finals = {0};
                return n;
            }
            ObligationNfa acc = compile_activity(node.children[0]);
            for (size_t i = 1; i < node.children.size(); ++i) {
                ObligationNfa next = compile_activity(node.children[i]);
                // Glue: every final of acc also plays the role of next.start.
                ObligationNfa merged;
                merged.n_states = acc.n_states + next.n_states;
                merged.start = acc.start;
                merged.edges = acc.edges;
                int off = acc.n_states;
                for (auto& [f, h, t] : next.edges) {
                    merged.edges.push_back({f + off, h, t + off});
                    if (f == next.start)
                        for (int fin : acc.finals) merged.edges.push_back({fin, h, t + off});
                }
                for (int fin : next.finals) merged.finals.insert(fin + off);
                if (next.finals.count(next.start))
                    for (int fin : acc.finals) merged.finals.insert(fin);
                acc = std::move(merged);
            }
            return acc;
        }
        case Kind::select: {
            ObligationNfa merged;
            merged.n_states = 1;  // shared start
            for (const auto& c : node.children) {
                ObligationNfa sub = compile_activity(c);
                int off = merged.n_states;
                merged.n_states += sub.n_states;
                for (auto& [f, h, t] : sub.edges) {
                    merged.edges.push_back({f + off, h, t + off});
                    if (f == sub.start) merged.edges.push_back({0, h, t + off});
                }
                for (int fin : sub.finals) merged.finals.insert(fin + off);
                if (sub.finals.count(sub.start)) merged.finals.insert(0);
            }
            return merged;
        }
        case Kind::schedule: {
            std::vector<ObligationNfa> subs;
            for (const auto& c : node.children) subs.push_back(compile_activity(c));
            // Product over tuples of branch states.
            std::map<std::vector<int>, int> index;
            std::vector<std::vector<int>> tuples;
            std::vector<int> start;
            for (auto& s : subs) start.push_back(s.start);
            index.emplace(start, 0);
            tuples.push_back(start);
            ObligationNfa n;
            n.n_states = 1;
            auto state_of = [&](const std::vector<int>& t) {
                auto [it, fresh] = index.emplace(t, static_cast<int>(tuples.size()));
                if (fresh) {
                    tuples.push_back(t);
                    ++n.n_states;
                }
                return it->second;
            };
            for (size_t cur = 0; cur < tuples.size(); ++cur) {
                const std::vector<int> tuple = tuples[cur];
                bool all_final = true;
                for (size_t b = 0; b < subs.size(); ++b) {
                    if (!subs[b].finals.count(tuple[b])) all_final = false;
                    for (auto& [f, h, t] : subs[b].edges) {
                        if (f != tuple[b]) continue;
                        std::vector<int> next = tuple;
                        next[b] = t;
                        n.edges.push_back({static_cast<int>(cur), h, state_of(next)});
                    }
                }
                if (all_final) n.finals.insert(static_cast<int>(cur));
            }
            return n;
        }
    }
    throw std::logic_error("unreachable");
}

}  // namespace detail

// One fully valued step of an inferred test.
struct InferredStep {
    std::string action;
    std::optional<Valuation> in;
    Valuation out;
    int matched_handle = -1;  // which VI obligation this step discharged, if any
};

struct InferredTest {
    std::vector<InferredStep> steps;

    int length() const { return static_cast<int>(steps.size()); }
};

struct UnsatisfiableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InferOptions {
    // Default: deterministic tie-break by action name, then out-valuation,
    // lexicographically. When sample is set, ties among equally short
    // continuations are drawn uniformly with the seed instead.
    bool sample = false;
    std::uint64_t seed = 0;
};

// Breadth-first backward action inference: starting from the completed-VI
// obligations, walk the (valuation x progress x pending-bind) graph against
// the arrows until the init action closes the chain, then emit the shortest
// test found, front to back.
inline InferredTest backward_infer(const ConstraintModel& m, const VerificationIntent& vi,
                                   const InferOptions& opts = {}) {
    validate_binds(vi);
    for (const auto& h : vi.handles)
        if (h.action < 0 || h.action >= static_cast<int>(m.actions.size()))
            throw std::invalid_argument("handle references unknown action: " + h.name);

    detail::ObligationNfa nfa = detail::compile_activity(vi.activity);
    std::map<int, int> bind_after;  // handle -> handle that must fire next
    for (auto& [a, b] : vi.binds) {
        if (!bind_after.emplace(a, b).second)
            throw std::invalid_argument("handle " + vi.handles[a].name +
                                        " is bound to two successors");
    }

    // Product node: valuation index (-1 = pre-init), NFA state, pending bind
    // (-1 = none). Forward edges first, restricted to what pre-init reaches.
    struct Edge {
        int to_node;
        int action;
        int handle;  // -1 for an intervening action
        Valuation out;
    };

    std::map<Valuation, int> val_index;
    std::vector<Valuation> vals;
    auto val_of = [&](const Valuation& v) {
        auto [it, fresh] = val_index.emplace(v, static_cast<int>(vals.size()));
        if (fresh) vals.push_back(v);
        return it->second;
    };

    using Node = std::tuple<int, int, int>;  // (val, nfa, pending)
    std::map<Node, int> node_index;
    std::vector<Node> nodes;
    auto node_of = [&](Node n) {
        auto [it, fresh] = node_index.emplace(n, static_cast<int>(nodes.size()));
        if (fresh) nodes.push_back(n);
        return it->second;
    };

    std::vector<std::vector<Edge>> edges;
    std::vector<std::vector<std::pair<int, int>>> nfa_out(nfa.n_states);  // (handle, to)
    for (auto& [f, h, t] : nfa.edges) nfa_out[f].push_back({h, t});

    int start_node = node_of({-1, nfa.start, -1});
    edges.resize(1);
    for (size_t cur = 0; cur < nodes.size(); ++cur) {
        auto [vi_val, nfa_state, pending] = nodes[cur];
        edges.resize(nodes.size());
        Valuation in_copy;  // vals may reallocate while we expand
        const Valuation* in_val = nullptr;
        if (vi_val >= 0) {
            in_copy = vals[vi_val];
            in_val = &in_copy;
        }
        for (size_t ai = 0; ai < m.actions.size(); ++ai) {
            const ActionDef& a = m.actions[ai];
            bool is_init = static_cast<int>(ai) == m.init_action;
            if (is_init != (vi_val < 0)) continue;  // init fires exactly from pre-init
            auto outs = solve(m.flow, a, in_val);
            for (const auto& out : outs) {
                int out_idx = val_of(out);
                // Option 1: discharge an enabled obligation.
                for (auto& [h, to] : nfa_out[nfa_state]) {
                    if (vi.handles[h].action != static_cast<int>(ai)) continue;
                    if (pending >= 0 && h != pending) continue;
                    if (!vi.handles[h].constraints.empty()) {
                        auto narrowed = solve(m.flow, a, in_val, &vi.handles[h].constraints);
                        if (std::find(narrowed.begin(), narrowed.end(), out) ==
                            narrowed.end())
                            continue;
                    }
                    auto bind_it = bind_after.find(h);
                    int next_pending = bind_it == bind_after.end() ? -1 : bind_it->second;
                    edges[cur].push_back(
                        Edge{node_of({out_idx, to, next_pending}), static_cast<int>(ai), h, out});
                }
                // Option 2: intervene, unless a bind window is open.
                if (pending < 0)
                    edges[cur].push_back(
                        Edge{node_of({out_idx, nfa_state, -1}), static_cast<int>(ai), -1, out});
            }
        }
    }
    edges.resize(nodes.size());

    // Backward breadth-first sweep from every completed-VI node.
    std::vector<std::vector<int>> reverse(nodes.size());
    for (size_t from = 0; from < edges.size(); ++from)
        for (const auto& e : edges[from]) reverse[e.to_node].push_back(static_cast<int>(from));

    constexpr int kInf = std::numeric_limits<int>::max();
    std::vector<int> dist(nodes.size(), kInf);
    std::vector<int> frontier;
    for (size_t i = 0; i < nodes.size(); ++i) {
        auto [v, q, pending] = nodes[i];
        if (nfa.finals.count(q) && pending < 0) {
            dist[i] = 0;
            frontier.push_back(static_cast<int>(i));
        }
    }
    for (size_t i = 0; i < frontier.size(); ++i) {
        int n = frontier[i];
        for (int prev : reverse[n]) {
            if (dist[prev] == kInf) {
                dist[prev] = dist[n] + 1;
                frontier.push_back(prev);
            } else {
                dist[prev] = std::min(dist[prev], dist[n] + 1);
            }
        }
    }
    if (dist[start_node] == kInf)
        throw UnsatisfiableError("no action chain satisfies the verification intent");

    // Emit the shortest chain, resolving ties deterministically (or by seed).
    std::mt19937_64 rng(opts.seed);
    InferredTest test;
    int node = start_node;
    while (dist[node] > 0) {
        std::vector<const Edge*> best;
        for (const auto& e : edges[node])
            if (dist[e.to_node] == dist[node] - 1) best.push_back(&e);
        auto key = [&](const Edge* e) {
            return std::make_tuple(m.actions[e->action].name, e->out, e->handle);
        };
        const Edge* chosen;
        if (opts.sample) {
            std::sort(best.begin(), best.end(),
                      [&](const Edge* a, const Edge* b) { return key(a) < key(b); });
            chosen = best[rng() % best.size()];
        } else {
            chosen = *std::min_element(best.begin(), best.end(),
                                       [&](const Edge* a, const Edge* b) {
                                           return key(a) < key(b);
                                       });
        }
        auto [vi_val, nfa_state, pending] = nodes[node];
        InferredStep step;
        step.action = m.actions[chosen->action].name;
        if (vi_val >= 0) step.in = vals[vi_val];
        step.out = chosen->out;
        step.matched_handle = chosen->handle;
        test.steps.push_back(std::move(step));
        node = chosen->to_node;
    }
    return test;
}

// Replays an inferred test as a path of the constraint LTS semantics:
// every step's constraints hold and adjacent valuations chain.
inline bool replays(const ConstraintModel& m, const InferredTest& t) {
    if (t.steps.empty()) return false;
    const Valuation* prev = nullptr;
    for (size_t i = 0; i < t.steps.size(); ++i) {
        const auto& step = t.steps[i];
        int ai = m.action_index(step.action);
        if (ai < 0) return false;
        bool is_init = ai == m.init_action;
        if (is_init != (i == 0)) return false;
        if (step.in.has_value() != (prev != nullptr)) return false;
        if (prev && step.in && *step.in != *prev) return false;
        auto outs = solve(m.flow, m.actions[ai], prev);
        if (std::find(outs.begin(), outs.end(), step.out) == outs.end()) return false;
        prev = &t.steps[i].out;
    }
    return true;
}

}  // namespace isoltest
