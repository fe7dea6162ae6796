#pragma once

#include <cstdlib>
#include <functional>
#include <map>
#include <queue>

#include "isoltest/lts.hpp"

namespace isoltest {

// A gate with a rule synchronizes exactly the listed components: a label on
// that gate fires iff every participant offers a transition with that exact
// label, and all of them move together. Gates without a rule, and tau,
// interleave.
struct SyncRule {
    std::string gate;
    std::set<int> participants;
};

inline constexpr long kDefaultStateLimit = 10'000'000;

struct ResourceLimitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline long state_limit_from_env(long fallback = kDefaultStateLimit) {
    if (const char* v = std::getenv("ISOLTEST_STATE_LIMIT")) {
        long parsed = std::atol(v);
        if (parsed > 0) return parsed;
    }
    return fallback;
}

inline Lts parallel_compose(const std::vector<Lts>& components,
                            const std::vector<SyncRule>& rules,
                            long state_limit = kDefaultStateLimit) {
    const int n = static_cast<int>(components.size());
    if (n == 0) throw std::invalid_argument("parallel_compose: no components");
    std::map<std::string, const SyncRule*> by_gate;
    for (const auto& r : rules) {
        if (r.participants.empty())
            throw std::invalid_argument("sync rule with empty participant set");
        for (int p : r.participants)
            if (p < 0 || p >= n)
                throw std::invalid_argument("sync rule references unknown component " +
                                            std::to_string(p));
        if (!by_gate.emplace(r.gate, &r).second)
            throw std::invalid_argument("gate appears in more than one rule: " + r.gate);
    }

    // Per component: label-text -> transitions, to look up matching offers.
    std::vector<std::vector<std::vector<Transition>>> out(n);
    for (int c = 0; c < n; ++c) out[c] = components[c].outgoing();

    std::vector<int> init(n);
    for (int c = 0; c < n; ++c) init[c] = components[c].initial();

    std::map<std::vector<int>, int> index;
    std::vector<std::vector<int>> tuples;
    index.emplace(init, 0);
    tuples.push_back(init);

    Lts product(1, 0);
    for (size_t cur = 0; cur < tuples.size(); ++cur) {
        const std::vector<int> tuple = tuples[cur];

        // Candidate moves from this tuple: (label, participating component moves).
        // Collected into a sorted map so emission order is canonical.
        std::map<std::string, std::pair<Label, std::vector<std::vector<int>>>> synced;
        std::vector<std::pair<Label, std::pair<int, int>>> solo;  // label, (component, target)

        for (int c = 0; c < n; ++c) {
            for (const auto& t : out[c][tuple[c]]) {
                const Label& lab = components[c].label(t.label);
                auto rule_it = lab.is_tau() ? by_gate.end() : by_gate.find(lab.gate);
                if (rule_it == by_gate.end()) {
                    solo.push_back({lab, {c, t.to}});
                } else if (rule_it->second->participants.count(c)) {
                    auto& entry = synced[to_string(lab)];
                    if (entry.second.empty()) {
                        entry.first = lab;
                        entry.second.assign(n, {});
                    }
                    entry.second[c].push_back(t.to);
                }
                // A synchronized gate offered by a non-participant can never
                // fire for that component; drop it.
            }
        }

        auto emit = [&](const Label& lab, const std::vector<int>& next) {
            auto [it, fresh] = index.emplace(next, static_cast<int>(tuples.size()));
            if (fresh) {
                tuples.push_back(next);
                product.add_state();
                if (static_cast<long>(tuples.size()) > state_limit)
                    throw ResourceLimitError("parallel_compose: state limit exceeded");
            }
            product.add_transition(static_cast<int>(cur), lab, it->second);
        };

        for (const auto& [lab, move] : solo) {
            std::vector<int> next = tuple;
            next[move.first] = move.second;
            emit(lab, next);
        }
        for (const auto& [key, entry] : synced) {
            const Label& lab = entry.first;
            const auto& participants = by_gate.at(lab.gate)->participants;
            bool all_ready = true;
            for (int p : participants)
                if (entry.second[p].empty()) { all_ready = false; break; }
            if (!all_ready) continue;
            // Cross product of participant choices.
            std::vector<int> next = tuple;
            std::function<void(std::set<int>::const_iterator)> expand =
                [&](std::set<int>::const_iterator it) {
                    if (it == participants.end()) {
                        emit(lab, next);
                        return;
                    }
                    int p = *it;
                    for (int target : entry.second[p]) {
                        next[p] = target;
                        expand(std::next(it));
                    }
                    next[p] = tuple[p];
                };
            expand(participants.begin());
        }
    }
    product.dedupe();
    return product;
}

}  // namespace isoltest
