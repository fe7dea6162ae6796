#pragma once

#include "isoltest/lts.hpp"

namespace isoltest::testutil {

// Naive greatest-fixed-point oracle for strong bisimulation: start from the
// full relation and delete pairs until stable.
inline std::vector<std::vector<bool>> strong_oracle(const Lts& l) {
    const int n = l.num_states();
    auto out = l.outgoing();
    std::vector<std::vector<bool>> rel(n, std::vector<bool>(n, true));
    bool changed = true;
    auto simulates = [&](int p, int q) {
        for (const auto& tp : out[p]) {
            bool found = false;
            for (const auto& tq : out[q])
                if (tq.label == tp.label && rel[tp.to][tq.to]) {
                    found = true;
                    break;
                }
            if (!found) return false;
        }
        return true;
    };
    while (changed) {
        changed = false;
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q)
                if (rel[p][q] && (!simulates(p, q) || !simulates(q, p))) {
                    rel[p][q] = false;
                    changed = true;
                }
    }
    return rel;
}

// Naive oracle for (divergence-blind) branching bisimulation, from the
// classic transfer condition: p -a-> p' must be matched by q ==tau*==> q1
// -a-> q' with (p, q1) and (p', q') related, or, when a is internal, by
// staying put with (p', q) related.
inline std::vector<std::vector<bool>> branching_oracle(const Lts& l) {
    const int n = l.num_states();
    auto out = l.outgoing();
    std::vector<std::vector<bool>> tau_reach(n, std::vector<bool>(n, false));
    for (int s = 0; s < n; ++s) tau_reach[s][s] = true;
    bool grow = true;
    while (grow) {
        grow = false;
        for (int s = 0; s < n; ++s)
            for (int m = 0; m < n; ++m)
                if (tau_reach[s][m])
                    for (const auto& t : out[m])
                        if (t.label == Lts::kTau && !tau_reach[s][t.to]) {
                            tau_reach[s][t.to] = true;
                            grow = true;
                        }
    }

    std::vector<std::vector<bool>> rel(n, std::vector<bool>(n, true));
    auto transfers = [&](int p, int q) {
        for (const auto& tp : out[p]) {
            if (tp.label == Lts::kTau && rel[tp.to][q]) continue;
            bool found = false;
            for (int q1 = 0; q1 < n && !found; ++q1) {
                if (!tau_reach[q][q1] || !rel[p][q1]) continue;
                for (const auto& tq : out[q1])
                    if (tq.label == tp.label && rel[tp.to][tq.to]) {
                        found = true;
                        break;
                    }
            }
            if (!found) return false;
        }
        return true;
    };
    bool changed = true;
    while (changed) {
        changed = false;
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q)
                if (rel[p][q] && (!transfers(p, q) || !transfers(q, p))) {
                    rel[p][q] = false;
                    changed = true;
                }
    }
    return rel;
}

}  // namespace isoltest::testutil
