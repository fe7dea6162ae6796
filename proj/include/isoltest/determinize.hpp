#pragma once

#include <map>

#include "isoltest/compose.hpp"
#include "isoltest/lts.hpp"

namespace isoltest {

namespace detail {

inline std::vector<int> tau_closure(const std::vector<std::vector<int>>& tau_out,
                                    std::vector<int> seed) {
    std::vector<int> closed = std::move(seed);
    std::set<int> seen(closed.begin(), closed.end());
    for (size_t i = 0; i < closed.size(); ++i)
        for (int to : tau_out[closed[i]])
            if (seen.insert(to).second) closed.push_back(to);
    std::vector<int> result(seen.begin(), seen.end());
    return result;
}

}  // namespace detail

// Subset construction over tau closures: the result is tau-free,
// deterministic, and has the same set of visible traces as the input.
inline Lts determinize(const Lts& l, long state_limit = kDefaultStateLimit) {
    const int n = l.num_states();
    std::vector<std::vector<int>> tau_out(n);
    std::vector<std::vector<std::pair<int, int>>> vis_out(n);  // (label, to)
    for (const auto& t : l.transitions()) {
        if (t.label == Lts::kTau)
            tau_out[t.from].push_back(t.to);
        else
            vis_out[t.from].push_back({t.label, t.to});
    }

    std::map<std::vector<int>, int> index;
    std::vector<std::vector<int>> subsets;
    auto init = detail::tau_closure(tau_out, {l.initial()});
    index.emplace(init, 0);
    subsets.push_back(init);

    Lts result(1, 0);
    for (size_t cur = 0; cur < subsets.size(); ++cur) {
        const std::vector<int> subset = subsets[cur];
        std::map<int, std::set<int>> moves;  // label -> raw targets
        for (int s : subset)
            for (auto& [lab, to] : vis_out[s]) moves[lab].insert(to);
        for (auto& [lab, targets] : moves) {
            auto next = detail::tau_closure(
                tau_out, std::vector<int>(targets.begin(), targets.end()));
            auto [it, fresh] = index.emplace(next, static_cast<int>(subsets.size()));
            if (fresh) {
                subsets.push_back(next);
                result.add_state();
                if (static_cast<long>(subsets.size()) > state_limit)
                    throw ResourceLimitError("determinize: state limit exceeded");
            }
            result.add_transition(static_cast<int>(cur), l.label(lab), it->second);
        }
    }
    result.dedupe();
    return result;
}

}  // namespace isoltest
