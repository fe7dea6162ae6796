#pragma once

#include <map>
#include <optional>

#include "isoltest/lts.hpp"

namespace isoltest {

// ---- Test purposes -------------------------------------------------------

struct OfferPattern {
    enum class Kind { literal, wildcard, capture } kind = Kind::wildcard;
    Value literal;
    std::string var;  // capture variable name
};

struct LabelPattern {
    std::string gate;
    std::vector<OfferPattern> offers;
};

// Guard over captured variables, using the value ordinals for the
// comparisons; operands are variables or literals.
struct GuardTerm {
    bool is_var = false;
    std::string var;
    Value literal;
};

struct GuardExpr {
    enum class Kind { cmp, land, lor, lnot } kind = Kind::cmp;
    // cmp ops reuse the spelling of the DSL: == != < <= > >=
    std::string op;
    GuardTerm lhs, rhs;
    std::vector<GuardExpr> children;
};

struct TpTransition {
    enum class Kind { match, refuse } kind = Kind::match;
    int from = 0;
    int to = -1;  // refuse transitions carry no destination
    LabelPattern pattern;
    std::optional<GuardExpr> guard;
};

struct TestPurpose {
    std::string name;
    int n_states = 0;
    int initial = 0;
    std::set<int> accept;
    std::vector<TpTransition> transitions;
};

// ---- Matching ------------------------------------------------------------

using CaptureEnv = std::map<std::string, Value>;

inline bool eval_guard(const GuardExpr& g, const CaptureEnv& env);

namespace detail {

inline std::optional<Value> guard_value(const GuardTerm& t, const CaptureEnv& env) {
    if (!t.is_var) return t.literal;
    auto it = env.find(t.var);
    if (it == env.end()) return std::nullopt;
    return it->second;
}

}  // namespace detail

inline bool eval_guard(const GuardExpr& g, const CaptureEnv& env) {
    switch (g.kind) {
        case GuardExpr::Kind::cmp: {
            auto a = detail::guard_value(g.lhs, env);
            auto b = detail::guard_value(g.rhs, env);
            if (!a || !b)
                throw std::invalid_argument("guard references unbound capture variable");
            if (g.op == "==") return a->text == b->text;
            if (g.op == "!=") return a->text != b->text;
            if (g.op == "<") return a->ord < b->ord;
            if (g.op == "<=") return a->ord <= b->ord;
            if (g.op == ">") return a->ord > b->ord;
            if (g.op == ">=") return a->ord >= b->ord;
            throw std::invalid_argument("unknown guard operator: " + g.op);
        }
        case GuardExpr::Kind::land:
            for (const auto& c : g.children)
                if (!eval_guard(c, env)) return false;
            return true;
        case GuardExpr::Kind::lor:
            for (const auto& c : g.children)
                if (eval_guard(c, env)) return true;
            return false;
        case GuardExpr::Kind::lnot:
            return !eval_guard(g.children.at(0), env);
    }
    return false;
}

// Attempts to match a concrete label against a pattern under an existing
// capture environment. A capture offer binds on first occurrence and acts
// as an equality test afterwards. Returns the extended environment on
// success.
inline std::optional<CaptureEnv> match_label(const LabelPattern& pat,
                                             const std::optional<GuardExpr>& guard,
                                             const Label& lab, const CaptureEnv& env) {
    if (lab.is_tau() || lab.gate != pat.gate) return std::nullopt;
    if (lab.offers.size() != pat.offers.size()) return std::nullopt;
    CaptureEnv extended = env;
    for (size_t i = 0; i < pat.offers.size(); ++i) {
        const auto& p = pat.offers[i];
        const auto& v = lab.offers[i];
        switch (p.kind) {
            case OfferPattern::Kind::literal:
                if (!(p.literal == v)) return std::nullopt;
                break;
            case OfferPattern::Kind::wildcard:
                break;
            case OfferPattern::Kind::capture: {
                auto it = extended.find(p.var);
                if (it == extended.end())
                    extended.emplace(p.var, v);
                else if (!(it->second == v))
                    return std::nullopt;
                break;
            }
        }
    }
    if (guard && !eval_guard(*guard, extended)) return std::nullopt;
    return extended;
}

// ---- Synchronous product -------------------------------------------------

// Product of a behavioral model with a test purpose. Per model transition,
// matching priority is refuse > match > stutter: a satisfied refuse prunes
// the transition, otherwise every satisfied match moves model and purpose
// together, and an unmatched label moves the model alone.
struct TpProduct {
    Lts lts;
    std::vector<bool> accept;    // per product state
    std::vector<int> tp_state;   // purpose component of each product state
    std::vector<int> model_state;
    std::vector<CaptureEnv> env;  // captures bound so far, per product state
};

inline TpProduct product(const Lts& model, const TestPurpose& tp,
                         long state_limit = 10'000'000) {
    struct Key {
        int m, t;
        CaptureEnv env;
        bool operator<(const Key& b) const {
            if (m != b.m) return m < b.m;
            if (t != b.t) return t < b.t;
            return env < b.env;
        }
    };

    std::vector<std::vector<const TpTransition*>> tp_out(tp.n_states);
    for (const auto& t : tp.transitions) tp_out[t.from].push_back(&t);

    auto model_out = model.outgoing();
    for (auto& v : model_out) std::sort(v.begin(), v.end());

    std::map<Key, int> index;
    std::vector<Key> keys;
    Key init{model.initial(), tp.initial, {}};
    index.emplace(init, 0);
    keys.push_back(init);

    TpProduct prod;
    prod.lts = Lts(1, 0);
    auto emit_state = [&](Key k) {
        auto [it, fresh] = index.emplace(k, static_cast<int>(keys.size()));
        if (fresh) {
            keys.push_back(std::move(k));
            prod.lts.add_state();
            if (static_cast<long>(keys.size()) > state_limit)
                throw std::runtime_error("tp product: state limit exceeded");
        }
        return it->second;
    };

    for (size_t cur = 0; cur < keys.size(); ++cur) {
        const Key key = keys[cur];
        for (const auto& mt : model_out[key.m]) {
            const Label& lab = model.label(mt.label);

            bool refused = false;
            for (const auto* tt : tp_out[key.t]) {
                if (tt->kind != TpTransition::Kind::refuse) continue;
                if (match_label(tt->pattern, tt->guard, lab, key.env)) {
                    refused = true;
                    break;
                }
            }
            if (refused) continue;

            bool matched = false;
            for (const auto* tt : tp_out[key.t]) {
                if (tt->kind != TpTransition::Kind::match) continue;
                if (auto env2 = match_label(tt->pattern, tt->guard, lab, key.env)) {
                    matched = true;
                    prod.lts.add_transition(static_cast<int>(cur), lab,
                                            emit_state(Key{mt.to, tt->to, *env2}));
                }
            }
            if (!matched)
                prod.lts.add_transition(static_cast<int>(cur), lab,
                                        emit_state(Key{mt.to, key.t, key.env}));
        }
    }
    prod.lts.dedupe();
    prod.accept.resize(keys.size());
    prod.tp_state.resize(keys.size());
    prod.model_state.resize(keys.size());
    prod.env.resize(keys.size());
    for (size_t i = 0; i < keys.size(); ++i) {
        prod.accept[i] = tp.accept.count(keys[i].t) > 0;
        prod.tp_state[i] = keys[i].t;
        prod.model_state[i] = keys[i].m;
        prod.env[i] = keys[i].env;
    }
    return prod;
}

}  // namespace isoltest
