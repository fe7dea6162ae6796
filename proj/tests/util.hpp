#pragma once

#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>

#include "isoltest/aut.hpp"
#include "isoltest/lts.hpp"

namespace isoltest::testutil {

// Random LTS over a tiny alphabet (tau, a, b, c) with a controllable density,
// used by the property tests. Deterministic per seed.
inline Lts random_lts(uint64_t seed, int n_states = 50, int n_transitions = 120,
                      bool with_tau = true) {
    std::mt19937_64 rng(seed);
    Lts l(n_states, 0);
    std::vector<Label> alphabet;
    if (with_tau) alphabet.push_back(tau_label());
    alphabet.push_back(Label{"a", {}});
    alphabet.push_back(Label{"b", {}});
    alphabet.push_back(Label{"c", {}});
    std::uniform_int_distribution<int> state(0, n_states - 1);
    std::uniform_int_distribution<size_t> lab(0, alphabet.size() - 1);
    for (int i = 0; i < n_transitions; ++i)
        l.add_transition(state(rng), alphabet[lab(rng)], state(rng));
    l.dedupe();
    return l;
}

// Transition triples with label spellings, independent of label interning
// order, plus the initial state. Two LTSs with equal snapshots are identical
// up to label table layout.
inline std::set<std::tuple<int, std::string, int>> triples(const Lts& l) {
    std::set<std::tuple<int, std::string, int>> s;
    for (const auto& t : l.transitions())
        s.insert({t.from, to_string(l.label(t.label)), t.to});
    return s;
}

inline Lts aut_round_trip(const Lts& l) {
    std::stringstream ss;
    aut_write(l, ss);
    return aut_read(ss);
}

// Exact identity modulo label interning: state numbering, initial state and
// transition triples all agree.
inline bool identical(const Lts& a, const Lts& b) {
    return a.num_states() == b.num_states() && a.initial() == b.initial() &&
           triples(a) == triples(b);
}

}  // namespace isoltest::testutil
