#include <catch_amalgamated.hpp>

#include "isoltest/determinize.hpp"
#include "isoltest/equivalence.hpp"
#include "isoltest/minimize.hpp"
#include "bisim_oracle.hpp"
#include "util.hpp"

using namespace isoltest;


TEST_CASE("duplicate branches collapse under strong minimization") {
    Lts l(4, 0);
    l.add_transition(0, Label{"a", {}}, 1);
    l.add_transition(0, Label{"a", {}}, 2);
    l.add_transition(1, Label{"b", {}}, 3);
    l.add_transition(2, Label{"b", {}}, 3);
    CHECK(minimize(l, Relation::strong).num_states() == 3);
}

TEST_CASE("an inert tau collapses under branching minimization") {
    Lts l(3, 0);
    l.add_transition(0, tau_label(), 1);
    l.add_transition(1, Label{"a", {}}, 2);
    Lts m = minimize(l, Relation::branching);
    CHECK(m.num_states() == 2);
    CHECK_FALSE(m.has_tau_transition());
}

TEST_CASE("partitions agree with the greatest-fixed-point oracles") {
    for (uint64_t seed = 0; seed < 100; ++seed) {
        Lts l = testutil::random_lts(seed);
        const int n = l.num_states();

        auto sblock = bisimulation_partition(l, Relation::strong);
        auto srel = testutil::strong_oracle(l);
        auto bblock = bisimulation_partition(l, Relation::branching);
        auto brel = testutil::branching_oracle(l);
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q) {
                REQUIRE((sblock[p] == sblock[q]) == srel[p][q]);
                REQUIRE((bblock[p] == bblock[q]) == brel[p][q]);
            }
    }
}

TEST_CASE("minimize is idempotent and preserves the equivalence class") {
    for (uint64_t seed = 0; seed < 100; ++seed) {
        Lts l = testutil::random_lts(seed);
        for (Relation r : {Relation::strong, Relation::branching}) {
            Lts m = minimize(l, r);
            Lts mm = minimize(m, r);
            REQUIRE(mm.num_states() == m.num_states());
            REQUIRE(mm.num_transitions() == m.num_transitions());
            REQUIRE(equivalent(l, m, r).equivalent);
        }
    }
}

TEST_CASE("strong implies branching implies weak-trace") {
    for (uint64_t seed = 0; seed < 25; ++seed) {
        Lts a = testutil::random_lts(seed);
        Lts b = minimize(a, Relation::strong);
        REQUIRE(equivalent(a, b, Relation::strong).equivalent);
        REQUIRE(equivalent(a, b, Relation::branching).equivalent);
        REQUIRE(equivalent(a, b, Relation::weak_trace).equivalent);

        Lts c = minimize(a, Relation::branching);
        REQUIRE(equivalent(a, c, Relation::branching).equivalent);
        REQUIRE(equivalent(a, c, Relation::weak_trace).equivalent);
    }
}

TEST_CASE("equivalence is reflexive and distinguishes disjoint alphabets") {
    Lts a(1, 0);
    a.add_transition(0, Label{"a", {}}, 0);
    for (Relation r : {Relation::strong, Relation::branching, Relation::weak_trace})
        CHECK(equivalent(a, a, r).equivalent);

    Lts b(1, 0);
    b.add_transition(0, Label{"b", {}}, 0);
    auto res = equivalent(a, b, Relation::weak_trace);
    CHECK_FALSE(res.equivalent);
    REQUIRE(res.trace.size() == 1);
    CHECK(to_string(res.trace[0]) == "a");
}

TEST_CASE("determinize yields a deterministic tau-free trace-equivalent LTS") {
    for (uint64_t seed = 0; seed < 25; ++seed) {
        Lts l = restrict_reachable(testutil::random_lts(seed));
        Lts d = determinize(l);
        CHECK_FALSE(d.has_tau_transition());
        std::set<std::pair<int, int>> outgoing;
        for (const auto& t : d.transitions())
            REQUIRE(outgoing.insert({t.from, t.label}).second);  // deterministic
        REQUIRE(equivalent(l, d, Relation::weak_trace).equivalent);
    }
}

TEST_CASE("determinize is the identity on deterministic tau-free input") {
    Lts l(3, 0);
    l.add_transition(0, Label{"a", {}}, 1);
    l.add_transition(1, Label{"b", {}}, 2);
    CHECK(testutil::identical(determinize(l), l));
}

TEST_CASE("determinize closes over tau") {
    Lts l(3, 0);
    l.add_transition(0, tau_label(), 1);
    l.add_transition(1, Label{"a", {}}, 2);
    Lts d = determinize(l);
    CHECK(d.num_states() == 2);
    CHECK(d.num_transitions() == 1);
    CHECK(to_string(d.label(d.transitions()[0].label)) == "a");
}
