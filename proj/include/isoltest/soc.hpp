#pragma once

#include <array>
#include <map>

#include "isoltest/compose.hpp"
#include "isoltest/lts.hpp"

namespace isoltest {

enum class SecurityLevel { nonsecure = 0, secure = 1 };
enum class PrivilegeLevel { nonprivileged = 0, privileged = 1 };
enum class DataValue { data1 = 0, data2 = 1 };

inline Value to_value(SecurityLevel s) {
    return Value{s == SecurityLevel::secure ? "SECURE" : "NONSECURE", static_cast<int>(s)};
}
inline Value to_value(PrivilegeLevel p) {
    return Value{p == PrivilegeLevel::privileged ? "PRIVILEGED" : "NONPRIVILEGED",
                 static_cast<int>(p)};
}
inline Value to_value(DataValue d) {
    return Value{d == DataValue::data2 ? "DATA2" : "DATA1", static_cast<int>(d)};
}

// A read or write is granted iff the source's levels dominate the target's;
// equivalently it is rejected iff the target is secure (resp. privileged)
// and the source is not.
inline bool valid_access(SecurityLevel tgt_sec, SecurityLevel src_sec,
                         PrivilegeLevel tgt_priv, PrivilegeLevel src_priv) {
    return static_cast<int>(src_sec) >= static_cast<int>(tgt_sec) &&
           static_cast<int>(src_priv) >= static_cast<int>(tgt_priv);
}

// Changing the target's protection is granted only to a secure and
// privileged source.
inline bool protection_change_allowed(SecurityLevel src_sec, PrivilegeLevel src_priv) {
    return src_sec == SecurityLevel::secure && src_priv == PrivilegeLevel::privileged;
}

struct SourceConfig {
    SecurityLevel security = SecurityLevel::secure;
    PrivilegeLevel privilege = PrivilegeLevel::privileged;
    DataValue data = DataValue::data1;

    friend bool operator==(const SourceConfig&, const SourceConfig&) = default;
};

struct TargetConfig {
    DataValue data = DataValue::data1;
    SecurityLevel security = SecurityLevel::nonsecure;
    PrivilegeLevel privilege = PrivilegeLevel::nonprivileged;

    friend bool operator==(const TargetConfig&, const TargetConfig&) = default;
};

// The eight source configurations, ordered security desc, privilege desc,
// data asc, so that a single default source is secure and privileged.
inline std::vector<SourceConfig> default_source_configs(int n) {
    std::vector<SourceConfig> all;
    for (int s = 1; s >= 0; --s)
        for (int p = 1; p >= 0; --p)
            for (int d = 0; d < 2; ++d)
                all.push_back(SourceConfig{static_cast<SecurityLevel>(s),
                                           static_cast<PrivilegeLevel>(p),
                                           static_cast<DataValue>(d)});
    std::vector<SourceConfig> result;
    for (int i = 0; i < n; ++i) result.push_back(all[i % all.size()]);
    return result;
}

struct SocParams {
    int n_sources = 1;
    bool multitasking = false;
    std::vector<SourceConfig> sources;  // filled from defaults when empty
    TargetConfig target;

    std::vector<SourceConfig> initial_sources() const {
        if (!sources.empty()) {
            if (static_cast<int>(sources.size()) != n_sources)
                throw std::invalid_argument("source config count does not match n_sources");
            return sources;
        }
        return default_source_configs(n_sources);
    }
};

enum class Mutation {
    none,
    drop_security_check,
    drop_privilege_check,
    allow_unprivileged_protection,
    stuck_grant_write,
};

inline Mutation mutation_from_string(const std::string& s) {
    if (s == "drop-security-check") return Mutation::drop_security_check;
    if (s == "drop-privilege-check") return Mutation::drop_privilege_check;
    if (s == "allow-unprivileged-protection") return Mutation::allow_unprivileged_protection;
    if (s == "stuck-grant-write") return Mutation::stuck_grant_write;
    throw std::invalid_argument("unknown mutation: " + s);
}

inline const std::vector<std::string>& mutation_catalog() {
    static const std::vector<std::string> ids{
        "drop-security-check", "drop-privilege-check",
        "allow-unprivileged-protection", "stuck-grant-write"};
    return ids;
}

namespace soc_gates {
inline constexpr const char* kRead = "READ";
inline constexpr const char* kWrite = "WRITE";
inline constexpr const char* kProtection = "PROTECTION";
inline constexpr const char* kConfig = "CONFIG";
inline constexpr const char* kGrantRead = "GRANT_READ";
inline constexpr const char* kGrantWrite = "GRANT_WRITE";
inline constexpr const char* kGrantProtection = "GRANT_PROTECTION";
inline constexpr const char* kRejectRead = "REJECT_READ";
inline constexpr const char* kRejectWrite = "REJECT_WRITE";
inline constexpr const char* kRejectProtection = "REJECT_PROTECTION";
}  // namespace soc_gates

inline const std::set<std::string>& soc_request_gates() {
    static const std::set<std::string> g{soc_gates::kRead, soc_gates::kWrite,
                                         soc_gates::kProtection, soc_gates::kConfig};
    return g;
}

inline const std::set<std::string>& soc_response_gates() {
    static const std::set<std::string> g{
        soc_gates::kGrantRead, soc_gates::kGrantWrite, soc_gates::kGrantProtection,
        soc_gates::kRejectRead, soc_gates::kRejectWrite, soc_gates::kRejectProtection};
    return g;
}

// Tester-side split: the tester drives requests and configuration changes,
// grants and rejects are observations.
inline bool soc_controllable_gate(const std::string& gate) {
    return soc_request_gates().count(gate) > 0;
}

namespace detail {

struct SocState {
    std::vector<SourceConfig> sources;
    TargetConfig target;
    // -1: no pending transaction; otherwise the pending source index with
    // the request kind (0 read, 1 write, 2 protection) and requested levels.
    int pending_src = -1;
    int pending_kind = 0;
    SecurityLevel req_sec = SecurityLevel::nonsecure;
    PrivilegeLevel req_priv = PrivilegeLevel::nonprivileged;

    friend auto operator<=>(const SocState& a, const SocState& b) {
        auto key = [](const SocState& s) {
            std::vector<int> k;
            for (const auto& c : s.sources) {
                k.push_back(static_cast<int>(c.security));
                k.push_back(static_cast<int>(c.privilege));
                k.push_back(static_cast<int>(c.data));
            }
            k.push_back(static_cast<int>(s.target.data));
            k.push_back(static_cast<int>(s.target.security));
            k.push_back(static_cast<int>(s.target.privilege));
            k.push_back(s.pending_src);
            k.push_back(s.pending_kind);
            k.push_back(static_cast<int>(s.req_sec));
            k.push_back(static_cast<int>(s.req_priv));
            return k;
        };
        return key(a) <=> key(b);
    }
};

inline bool mutated_valid_access(const TargetConfig& t, const SourceConfig& s,
                                 Mutation m) {
    bool sec_ok = static_cast<int>(s.security) >= static_cast<int>(t.security);
    bool priv_ok = static_cast<int>(s.privilege) >= static_cast<int>(t.privilege);
    if (m == Mutation::drop_security_check) sec_ok = true;
    if (m == Mutation::drop_privilege_check) priv_ok = true;
    return sec_ok && priv_ok;
}

inline bool mutated_protection_allowed(const SourceConfig& s, Mutation m) {
    if (m == Mutation::allow_unprivileged_protection)
        return s.security == SecurityLevel::secure;
    return protection_change_allowed(s.security, s.privilege);
}

}  // namespace detail

// Explicit LTS of the SoC: one serialized interconnect, one target, and
// n sources issuing read/write/protection requests; a multitasking source
// can additionally change its configuration while idle. Requests rendezvous
// with the target one at a time; the source identity travels in the first
// offer of every label.
inline Lts build_soc_lts(const SocParams& params, Mutation mutation = Mutation::none,
                         long state_limit = kDefaultStateLimit) {
    using namespace soc_gates;
    if (params.n_sources < 1)
        throw std::invalid_argument("build_soc_lts: need at least one source");

    detail::SocState init;
    init.sources = params.initial_sources();
    init.target = params.target;

    std::map<detail::SocState, int> index;
    std::vector<detail::SocState> states;
    index.emplace(init, 0);
    states.push_back(init);

    Lts lts(1, 0);
    auto emit = [&](int from, const Label& lab, const detail::SocState& next) {
        auto [it, fresh] = index.emplace(next, static_cast<int>(states.size()));
        if (fresh) {
            states.push_back(next);
            lts.add_state();
            if (static_cast<long>(states.size()) > state_limit)
                throw ResourceLimitError("build_soc_lts: state limit exceeded");
        }
        lts.add_transition(from, lab, it->second);
    };

    for (size_t cur = 0; cur < states.size(); ++cur) {
        const detail::SocState st = states[cur];
        const int from = static_cast<int>(cur);
        if (st.pending_src < 0) {
            for (int i = 0; i < params.n_sources; ++i) {
                const SourceConfig& cfg = st.sources[i];
                Value id = int_value(i);
                Value sec = to_value(cfg.security), priv = to_value(cfg.privilege);

                detail::SocState next = st;
                next.pending_src = i;
                next.pending_kind = 0;
                emit(from, Label{kRead, {id, sec, priv}}, next);

                next.pending_kind = 1;
                emit(from, Label{kWrite, {id, sec, priv, to_value(cfg.data)}}, next);

                next.pending_kind = 2;
                for (int ns = 0; ns < 2; ++ns)
                    for (int np = 0; np < 2; ++np) {
                        next.req_sec = static_cast<SecurityLevel>(ns);
                        next.req_priv = static_cast<PrivilegeLevel>(np);
                        emit(from,
                             Label{kProtection,
                                   {id, sec, priv, to_value(next.req_sec),
                                    to_value(next.req_priv)}},
                             next);
                    }

                if (params.multitasking) {
                    for (const auto& c : default_source_configs(8)) {
                        if (c == cfg) continue;
                        detail::SocState cc = st;
                        cc.sources[i] = c;
                        emit(from,
                             Label{kConfig,
                                   {id, to_value(c.security), to_value(c.privilege),
                                    to_value(c.data)}},
                             cc);
                    }
                }
            }
        } else {
            const int i = st.pending_src;
            const SourceConfig& cfg = st.sources[i];
            Value id = int_value(i);
            detail::SocState next = st;
            next.pending_src = -1;
            next.req_sec = SecurityLevel::nonsecure;
            next.req_priv = PrivilegeLevel::nonprivileged;
            switch (st.pending_kind) {
                case 0:  // read
                    if (detail::mutated_valid_access(st.target, cfg, mutation))
                        emit(from, Label{kGrantRead, {id, to_value(st.target.data)}}, next);
                    else
                        emit(from, Label{kRejectRead, {id}}, next);
                    break;
                case 1:  // write
                    if (detail::mutated_valid_access(st.target, cfg, mutation)) {
                        if (mutation != Mutation::stuck_grant_write)
                            next.target.data = cfg.data;
                        emit(from, Label{kGrantWrite, {id}}, next);
                    } else {
                        emit(from, Label{kRejectWrite, {id}}, next);
                    }
                    break;
                default:  // protection
                    if (detail::mutated_protection_allowed(cfg, mutation)) {
                        next.target.security = st.req_sec;
                        next.target.privilege = st.req_priv;
                        emit(from,
                             Label{kGrantProtection,
                                   {id, to_value(st.req_sec), to_value(st.req_priv)}},
                             next);
                    } else {
                        emit(from, Label{kRejectProtection, {id}}, next);
                    }
                    break;
            }
        }
    }
    lts.dedupe();
    return lts;
}

inline Lts mutate(const SocParams& params, const std::string& mutation_id,
                  long state_limit = kDefaultStateLimit) {
    return build_soc_lts(params, mutation_from_string(mutation_id), state_limit);
}

// Removes the source identity from every label and hides configuration
// changes, the preprocessing applied before cross-model comparisons.
inline Lts relabel_for_comparison(const Lts& l) {
    return rename_labels(l, [](const Label& lab) -> Label {
        if (lab.is_tau()) return lab;
        if (lab.gate == soc_gates::kConfig) return tau_label();
        if (!soc_request_gates().count(lab.gate) && !soc_response_gates().count(lab.gate))
            throw std::invalid_argument("relabel_for_comparison: unknown gate " + lab.gate);
        Label out = lab;
        out.offers.erase(out.offers.begin());
        return out;
    });
}

// --- Compositional route -------------------------------------------------
//
// Component automata plus all-participant rendezvous rules. Every IP offers
// self-loops for the labels of the other IPs, so a gate rule covering all
// components realizes the interconnect where everyone observes every
// transaction. Used to cross-check build_soc_lts.

inline std::vector<Label> soc_label_vocabulary(int n_sources) {
    using namespace soc_gates;
    std::vector<Label> v;
    for (int i = 0; i < n_sources; ++i) {
        Value id = int_value(i);
        for (int s = 0; s < 2; ++s)
            for (int p = 0; p < 2; ++p) {
                Value sec = to_value(static_cast<SecurityLevel>(s));
                Value priv = to_value(static_cast<PrivilegeLevel>(p));
                v.push_back(Label{kRead, {id, sec, priv}});
                for (int d = 0; d < 2; ++d)
                    v.push_back(Label{kWrite, {id, sec, priv, to_value(static_cast<DataValue>(d))}});
                for (int ns = 0; ns < 2; ++ns)
                    for (int np = 0; np < 2; ++np)
                        v.push_back(Label{kProtection,
                                          {id, sec, priv,
                                           to_value(static_cast<SecurityLevel>(ns)),
                                           to_value(static_cast<PrivilegeLevel>(np))}});
                v.push_back(Label{kGrantProtection, {id, sec, priv}});
            }
        for (int d = 0; d < 2; ++d)
            v.push_back(Label{kGrantRead, {id, to_value(static_cast<DataValue>(d))}});
        v.push_back(Label{kGrantWrite, {id}});
        v.push_back(Label{kRejectRead, {id}});
        v.push_back(Label{kRejectWrite, {id}});
        v.push_back(Label{kRejectProtection, {id}});
    }
    return v;
}

// Source IP automaton: idle / awaiting-read / awaiting-write /
// awaiting-protection, with observation self-loops for every label that
// carries a different source identity.
inline Lts source_component_lts(const SocParams& params, int source_idx) {
    using namespace soc_gates;
    if (params.multitasking)
        throw std::invalid_argument("compositional route models non-multitasking sources");
    const SourceConfig cfg = params.initial_sources().at(source_idx);
    Value id = int_value(source_idx);
    Value sec = to_value(cfg.security), priv = to_value(cfg.privilege);

    Lts l(4, 0);  // 0 idle, 1 wait-read, 2 wait-write, 3 wait-protection
    l.add_transition(0, Label{kRead, {id, sec, priv}}, 1);
    for (int d = 0; d < 2; ++d)
        l.add_transition(1, Label{kGrantRead, {id, to_value(static_cast<DataValue>(d))}}, 0);
    l.add_transition(1, Label{kRejectRead, {id}}, 0);

    l.add_transition(0, Label{kWrite, {id, sec, priv, to_value(cfg.data)}}, 2);
    l.add_transition(2, Label{kGrantWrite, {id}}, 0);
    l.add_transition(2, Label{kRejectWrite, {id}}, 0);

    for (int ns = 0; ns < 2; ++ns)
        for (int np = 0; np < 2; ++np) {
            Value nsec = to_value(static_cast<SecurityLevel>(ns));
            Value npriv = to_value(static_cast<PrivilegeLevel>(np));
            l.add_transition(0, Label{kProtection, {id, sec, priv, nsec, npriv}}, 3);
            l.add_transition(3, Label{kGrantProtection, {id, nsec, npriv}}, 0);
        }
    l.add_transition(3, Label{kRejectProtection, {id}}, 0);

    for (const auto& lab : soc_label_vocabulary(params.n_sources)) {
        if (lab.offers[0] == int_value(source_idx)) continue;
        for (int s = 0; s < 4; ++s) l.add_transition(s, lab, s);
    }
    l.dedupe();
    return l;
}

// Target IP automaton over its (data, security, privilege) configuration,
// accepting any request and answering per the access-control rules.
inline Lts target_component_lts(const SocParams& params) {
    using namespace soc_gates;
    const int n = params.n_sources;

    std::map<std::vector<int>, int> index;
    std::vector<std::vector<int>> keys;
    Lts l;
    auto state = [&](std::vector<int> key) {
        auto [it, fresh] = index.emplace(key, static_cast<int>(keys.size()));
        if (fresh) {
            keys.push_back(key);
            l.add_state();
        }
        return it->second;
    };
    auto central = [&](const TargetConfig& c) {
        return state({0, static_cast<int>(c.data), static_cast<int>(c.security),
                      static_cast<int>(c.privilege)});
    };
    int init = central(params.target);
    l.set_initial(init);

    for (int d = 0; d < 2; ++d)
        for (int s = 0; s < 2; ++s)
            for (int p = 0; p < 2; ++p) {
                TargetConfig c{static_cast<DataValue>(d), static_cast<SecurityLevel>(s),
                               static_cast<PrivilegeLevel>(p)};
                int cs = central(c);
                for (int i = 0; i < n; ++i) {
                    Value id = int_value(i);
                    for (int ts = 0; ts < 2; ++ts)
                        for (int tq = 0; tq < 2; ++tq) {
                            Value sec = to_value(static_cast<SecurityLevel>(ts));
                            Value priv = to_value(static_cast<PrivilegeLevel>(tq));
                            bool ok = valid_access(c.security, static_cast<SecurityLevel>(ts),
                                                   c.privilege, static_cast<PrivilegeLevel>(tq));

                            int pr = state({1, d, s, p, i, ts, tq});
                            l.add_transition(cs, Label{kRead, {id, sec, priv}}, pr);
                            if (ok)
                                l.add_transition(pr, Label{kGrantRead, {id, to_value(c.data)}}, cs);
                            else
                                l.add_transition(pr, Label{kRejectRead, {id}}, cs);

                            for (int wd = 0; wd < 2; ++wd) {
                                int pw = state({2, d, s, p, i, ts, tq, wd});
                                l.add_transition(
                                    cs,
                                    Label{kWrite, {id, sec, priv, to_value(static_cast<DataValue>(wd))}},
                                    pw);
                                if (ok) {
                                    TargetConfig c2 = c;
                                    c2.data = static_cast<DataValue>(wd);
                                    l.add_transition(pw, Label{kGrantWrite, {id}}, central(c2));
                                } else {
                                    l.add_transition(pw, Label{kRejectWrite, {id}}, cs);
                                }
                            }

                            bool prot_ok = protection_change_allowed(
                                static_cast<SecurityLevel>(ts), static_cast<PrivilegeLevel>(tq));
                            for (int ns = 0; ns < 2; ++ns)
                                for (int np = 0; np < 2; ++np) {
                                    int pp = state({3, d, s, p, i, ts, tq, ns, np});
                                    Value nsec = to_value(static_cast<SecurityLevel>(ns));
                                    Value npriv = to_value(static_cast<PrivilegeLevel>(np));
                                    l.add_transition(
                                        cs, Label{kProtection, {id, sec, priv, nsec, npriv}}, pp);
                                    if (prot_ok) {
                                        TargetConfig c2 = c;
                                        c2.security = static_cast<SecurityLevel>(ns);
                                        c2.privilege = static_cast<PrivilegeLevel>(np);
                                        l.add_transition(
                                            pp, Label{kGrantProtection, {id, nsec, npriv}},
                                            central(c2));
                                    } else {
                                        l.add_transition(pp, Label{kRejectProtection, {id}}, cs);
                                    }
                                }
                        }
                }
            }
    l.dedupe();
    return l;
}

// All request and response gates synchronize every IP.
inline std::vector<SyncRule> soc_sync_rules(int n_sources) {
    std::set<int> everyone;
    for (int i = 0; i <= n_sources; ++i) everyone.insert(i);
    std::vector<SyncRule> rules;
    for (const auto& g : soc_request_gates())
        if (g != soc_gates::kConfig) rules.push_back(SyncRule{g, everyone});
    for (const auto& g : soc_response_gates()) rules.push_back(SyncRule{g, everyone});
    return rules;
}

}  // namespace isoltest
