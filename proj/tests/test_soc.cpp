#include <catch_amalgamated.hpp>

#include "isoltest/equivalence.hpp"
#include "isoltest/minimize.hpp"
#include "isoltest/soc.hpp"

using namespace isoltest;

namespace {

std::set<std::string> gates_of(const Lts& l) {
    std::set<std::string> g;
    for (const auto& t : l.transitions())
        if (t.label != Lts::kTau) g.insert(l.label(t.label).gate);
    return g;
}

}  // namespace

TEST_CASE("access validity truth table") {
    // Independent oracle: a request is rejected iff the target is secure and
    // the source is not, or the target is privileged and the source is not.
    for (int ts = 0; ts < 2; ++ts)
        for (int ss = 0; ss < 2; ++ss)
            for (int tp = 0; tp < 2; ++tp)
                for (int sp = 0; sp < 2; ++sp) {
                    bool rejected = (ts == 1 && ss == 0) || (tp == 1 && sp == 0);
                    CHECK(valid_access(static_cast<SecurityLevel>(ts),
                                       static_cast<SecurityLevel>(ss),
                                       static_cast<PrivilegeLevel>(tp),
                                       static_cast<PrivilegeLevel>(sp)) == !rejected);
                }
    CHECK(valid_access(SecurityLevel::nonsecure, SecurityLevel::secure,
                       PrivilegeLevel::nonprivileged, PrivilegeLevel::privileged));
}

TEST_CASE("protection changes require a secure and privileged source") {
    CHECK(protection_change_allowed(SecurityLevel::secure, PrivilegeLevel::privileged));
    CHECK_FALSE(protection_change_allowed(SecurityLevel::nonsecure,
                                          PrivilegeLevel::nonprivileged));
    CHECK_FALSE(protection_change_allowed(SecurityLevel::secure,
                                          PrivilegeLevel::nonprivileged));
    CHECK_FALSE(protection_change_allowed(SecurityLevel::nonsecure,
                                          PrivilegeLevel::privileged));
}

TEST_CASE("default source configurations cycle through all eight combinations") {
    auto cfgs = default_source_configs(8);
    REQUIRE(cfgs.size() == 8);
    CHECK(cfgs[0].security == SecurityLevel::secure);
    CHECK(cfgs[0].privilege == PrivilegeLevel::privileged);
    std::set<std::tuple<int, int, int>> distinct;
    for (const auto& c : cfgs)
        distinct.insert({static_cast<int>(c.security), static_cast<int>(c.privilege),
                         static_cast<int>(c.data)});
    CHECK(distinct.size() == 8);
}

TEST_CASE("single fixed source never gets rejected") {
    SocParams p;
    p.n_sources = 1;
    Lts l = build_soc_lts(p);
    auto gates = gates_of(l);
    // The default single source is secure and privileged, dominating every
    // target level, so reads and writes always succeed.
    CHECK_FALSE(gates.count(soc_gates::kRejectRead));
    CHECK_FALSE(gates.count(soc_gates::kRejectWrite));
    CHECK(gates.count(soc_gates::kGrantRead));
    CHECK(gates.count(soc_gates::kGrantWrite));
    CHECK(gates.count(soc_gates::kGrantProtection));

    // Requests and responses strictly alternate: one pending transaction.
    auto out = l.outgoing();
    for (int s = 0; s < l.num_states(); ++s) {
        bool any_req = false, any_resp = false;
        for (const auto& t : out[s]) {
            const std::string& g = l.label(t.label).gate;
            (soc_request_gates().count(g) ? any_req : any_resp) = true;
        }
        CHECK_FALSE((any_req && any_resp));
    }
}

TEST_CASE("controllable split matches the request/response gate sets") {
    for (const auto& g : soc_request_gates()) CHECK(soc_controllable_gate(g));
    for (const auto& g : soc_response_gates()) CHECK_FALSE(soc_controllable_gate(g));
}

TEST_CASE("eight-source model minimizes to the reference size") {
    SocParams p;
    p.n_sources = 8;
    Lts m = minimize(build_soc_lts(p), Relation::strong);
    CHECK(m.num_states() == 182);
    CHECK(m.num_transitions() == 558);
    CHECK(m.num_visible_labels() == 98);

    Lts hidden = minimize(relabel_for_comparison(m), Relation::branching);
    CHECK(hidden.num_states() == 52);
    CHECK(hidden.num_transitions() == 268);
    CHECK(hidden.num_visible_labels() == 38);
}

TEST_CASE("relabel_for_comparison drops identities and hides configuration") {
    SocParams p;
    p.n_sources = 2;
    p.multitasking = true;
    Lts l = build_soc_lts(p);
    Lts r = relabel_for_comparison(l);
    CHECK(r.has_tau_transition());  // CONFIG became internal
    for (const auto& t : r.transitions()) {
        const Label& lab = r.label(t.label);
        if (lab.is_tau()) continue;
        CHECK(lab.gate != soc_gates::kConfig);
        // First offer (the source id) was removed: READ now has 2 offers.
        if (lab.gate == soc_gates::kRead) CHECK(lab.offers.size() == 2);
    }
}

TEST_CASE("eight sources equal one multitasking source up to branching") {
    SocParams p8;
    p8.n_sources = 8;
    SocParams p1;
    p1.n_sources = 1;
    p1.multitasking = true;
    Lts a = relabel_for_comparison(build_soc_lts(p8));
    Lts b = relabel_for_comparison(build_soc_lts(p1));
    CHECK(equivalent(a, b, Relation::branching).equivalent);
}

TEST_CASE("mutation catalog") {
    CHECK(mutation_catalog().size() == 4);
    CHECK_THROWS_AS(mutation_from_string("no-such-fault"), std::invalid_argument);
}

TEST_CASE("drop-security-check grants a nonsecure read of a secure target") {
    SocParams p;
    p.n_sources = 1;
    p.sources = {SourceConfig{SecurityLevel::nonsecure, PrivilegeLevel::nonprivileged,
                              DataValue::data1}};
    p.target.security = SecurityLevel::secure;
    Lts good = build_soc_lts(p);
    Lts bad = build_soc_lts(p, Mutation::drop_security_check);
    CHECK(gates_of(good).count(soc_gates::kRejectRead));
    CHECK_FALSE(gates_of(good).count(soc_gates::kGrantRead));
    CHECK(gates_of(bad).count(soc_gates::kGrantRead));
}

TEST_CASE("allow-unprivileged-protection lets a secure nonprivileged source through") {
    SocParams p;
    p.n_sources = 1;
    p.sources = {SourceConfig{SecurityLevel::secure, PrivilegeLevel::nonprivileged,
                              DataValue::data1}};
    Lts good = build_soc_lts(p);
    Lts bad = build_soc_lts(p, Mutation::allow_unprivileged_protection);
    CHECK_FALSE(gates_of(good).count(soc_gates::kGrantProtection));
    CHECK(gates_of(bad).count(soc_gates::kGrantProtection));
}

TEST_CASE("every mutant differs from the reference model") {
    SocParams p;
    p.n_sources = 8;
    Lts ref = relabel_for_comparison(build_soc_lts(p));
    for (const auto& id : mutation_catalog()) {
        Lts mut = relabel_for_comparison(mutate(p, id));
        CHECK_FALSE(equivalent(ref, mut, Relation::branching).equivalent);
    }
}

TEST_CASE("build_soc_lts validates its parameters") {
    SocParams p;
    p.n_sources = 0;
    CHECK_THROWS_AS(build_soc_lts(p), std::invalid_argument);
    SocParams q;
    q.n_sources = 3;
    q.sources = {SourceConfig{}};  // count mismatch
    CHECK_THROWS_AS(build_soc_lts(q), std::invalid_argument);
    SocParams r;
    r.n_sources = 8;
    CHECK_THROWS_AS(build_soc_lts(r, Mutation::none, /*state_limit=*/10),
                    ResourceLimitError);
}
