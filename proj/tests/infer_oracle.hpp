#pragma once

#include <deque>
#include <functional>

#include "isoltest/infer.hpp"

namespace isoltest::testutil {

// ---- Independent shortest-test oracle ------------------------------------
//
// Enumerates every handle order the activity admits (select = union,
// sequence = concatenation, schedule = all interleavings), then runs a
// forward breadth-first search over (valuation, position, forced?) per
// order. Shares nothing with the backward inference engine beyond the
// constraint solver.

using HandleSeq = std::vector<int>;

inline std::vector<HandleSeq> interleave(const std::vector<HandleSeq>& a,
                                         const std::vector<HandleSeq>& b) {
    std::function<std::vector<HandleSeq>(const HandleSeq&, const HandleSeq&)> mix =
        [&](const HandleSeq& x, const HandleSeq& y) -> std::vector<HandleSeq> {
        if (x.empty()) return {y};
        if (y.empty()) return {x};
        std::vector<HandleSeq> out;
        HandleSeq xt(x.begin() + 1, x.end());
        for (auto rest : mix(xt, y)) {
            rest.insert(rest.begin(), x[0]);
            out.push_back(std::move(rest));
        }
        HandleSeq yt(y.begin() + 1, y.end());
        for (auto rest : mix(x, yt)) {
            rest.insert(rest.begin(), y[0]);
            out.push_back(std::move(rest));
        }
        return out;
    };
    std::vector<HandleSeq> out;
    for (const auto& x : a)
        for (const auto& y : b)
            for (auto& m : mix(x, y)) out.push_back(std::move(m));
    return out;
}

inline std::vector<HandleSeq> admissible_orders(const ActivityNode& n) {
    switch (n.kind) {
        case ActivityNode::Kind::leaf:
            return {{n.handle}};
        case ActivityNode::Kind::sequence: {
            std::vector<HandleSeq> acc{{}};
            for (const auto& c : n.children) {
                std::vector<HandleSeq> next;
                for (const auto& pre : acc)
                    for (const auto& post : admissible_orders(c)) {
                        HandleSeq s = pre;
                        s.insert(s.end(), post.begin(), post.end());
                        next.push_back(std::move(s));
                    }
                acc = std::move(next);
            }
            return acc;
        }
        case ActivityNode::Kind::select: {
            std::vector<HandleSeq> out;
            for (const auto& c : n.children)
                for (auto& s : admissible_orders(c)) out.push_back(std::move(s));
            return out;
        }
        case ActivityNode::Kind::schedule: {
            std::vector<HandleSeq> acc{{}};
            for (const auto& c : n.children) acc = interleave(acc, admissible_orders(c));
            return acc;
        }
    }
    return {};
}

// Valuation interning plus per-(action, valuation) solver caches, shared
// across the many admissible orders of one intent.
struct OracleCache {
    std::map<Valuation, int> val_index;
    std::vector<Valuation> vals;
    std::map<std::pair<int, int>, std::vector<Valuation>> outs;      // (action, val)
    std::map<std::tuple<int, int, int>, std::vector<Valuation>> narrowed;  // + handle

    int val_of(const Valuation& v) {
        auto [it, fresh] = val_index.emplace(v, static_cast<int>(vals.size()));
        if (fresh) vals.push_back(v);
        return it->second;
    }
};

// Shortest chain length realizing one fixed handle order, or -1.
inline int shortest_for_order(const ConstraintModel& m, const VerificationIntent& vi,
                              const HandleSeq& order, OracleCache& cache) {
    std::map<int, int> bind_after;
    for (auto& [a, b] : vi.binds) bind_after[a] = b;

    auto val_of = [&](const Valuation& v) { return cache.val_of(v); };

    // State: (valuation index or -1 pre-init, next order position, forced?).
    using State = std::tuple<int, int, bool>;
    std::map<State, int> dist;
    std::deque<State> work;
    State start{-1, 0, false};
    dist[start] = 0;
    work.push_back(start);
    const int len = static_cast<int>(order.size());

    while (!work.empty()) {
        auto [vidx, pos, forced] = work.front();
        work.pop_front();
        int d = dist.at({vidx, pos, forced});
        if (pos == len) return d;
        for (size_t ai = 0; ai < m.actions.size(); ++ai) {
            const ActionDef& a = m.actions[ai];
            if ((static_cast<int>(ai) == m.init_action) != (vidx < 0)) continue;
            auto outs_it = cache.outs.find({static_cast<int>(ai), vidx});
            if (outs_it == cache.outs.end()) {
                const Valuation* in_ptr = vidx >= 0 ? &cache.vals[vidx] : nullptr;
                outs_it = cache.outs
                              .emplace(std::make_pair(static_cast<int>(ai), vidx),
                                       solve(m.flow, a, in_ptr))
                              .first;
            }
            for (const auto& out : outs_it->second) {
                auto push = [&](State s) {
                    if (dist.emplace(s, d + 1).second) work.push_back(s);
                };
                const ViHandle& h = vi.handles[order[pos]];
                bool discharges = h.action == static_cast<int>(ai);
                if (discharges && !h.constraints.empty()) {
                    auto key = std::make_tuple(static_cast<int>(ai), vidx, order[pos]);
                    auto nit = cache.narrowed.find(key);
                    if (nit == cache.narrowed.end()) {
                        const Valuation* in_ptr = vidx >= 0 ? &cache.vals[vidx] : nullptr;
                        nit = cache.narrowed
                                  .emplace(key, solve(m.flow, a, in_ptr, &h.constraints))
                                  .first;
                    }
                    const auto& narrowed = nit->second;
                    discharges = std::find(narrowed.begin(), narrowed.end(), out) !=
                                 narrowed.end();
                }
                if (discharges) {
                    auto bit = bind_after.find(order[pos]);
                    bool next_forced = false;
                    bool order_ok = true;
                    if (bit != bind_after.end()) {
                        // The bound successor must be the next obligation.
                        order_ok = pos + 1 < len && order[pos + 1] == bit->second;
                        next_forced = true;
                    }
                    if (order_ok) push({val_of(out), pos + 1, next_forced});
                }
                if (!forced) push({val_of(out), pos, false});
            }
        }
    }
    return -1;
}

inline int oracle_shortest(const ConstraintModel& m, const VerificationIntent& vi) {
    OracleCache cache;
    int best = -1;
    for (const auto& order : admissible_orders(vi.activity)) {
        int d = shortest_for_order(m, vi, order, cache);
        if (d >= 0 && (best < 0 || d < best)) best = d;
    }
    return best;
}

}  // namespace isoltest::testutil
