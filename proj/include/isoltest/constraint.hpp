#pragma once

#include <cctype>
#include <map>
#include <memory>
#include <optional>

#include "isoltest/compose.hpp"
#include "isoltest/lts.hpp"

namespace isoltest {

// ---- Flow object ---------------------------------------------------------

struct EnumDomain {
    std::string name;
    std::vector<std::string> values;  // ordered, position = ordinal

    int ordinal(const std::string& v) const {
        for (size_t i = 0; i < values.size(); ++i)
            if (values[i] == v) return static_cast<int>(i);
        return -1;
    }
};

struct FlowField {
    std::string name;
    EnumDomain domain;
};

// A state flow object type: named finite-domain fields plus the implicit
// boolean field `initial`, present exactly once and always last.
struct FlowObjectType {
    std::vector<FlowField> fields;

    FlowObjectType() {
        fields.push_back(FlowField{"initial", EnumDomain{"bool", {"false", "true"}}});
    }

    int field_index(const std::string& name) const {
        for (size_t i = 0; i < fields.size(); ++i)
            if (fields[i].name == name) return static_cast<int>(i);
        return -1;
    }

    int initial_field() const { return field_index("initial"); }

    void add_field(const std::string& name, EnumDomain domain) {
        if (field_index(name) >= 0)
            throw std::invalid_argument("duplicate flow field: " + name);
        // Keep `initial` last so user fields occupy a stable prefix.
        fields.insert(fields.end() - 1, FlowField{name, std::move(domain)});
    }

    int num_fields() const { return static_cast<int>(fields.size()); }
};

// Total assignment of every field to a domain ordinal.
using Valuation = std::vector<int>;

// ---- Constraint expressions ----------------------------------------------

enum class FlowSide { in, out };

struct Term {
    enum class Kind { field, literal } kind = Kind::literal;
    FlowSide side = FlowSide::in;
    int field = -1;
    int literal = 0;           // ordinal
    std::string literal_text;  // for diagnostics / unparse
};

enum class CmpOp { eq, ne, lt, le, gt, ge };

struct ConstraintExpr {
    enum class Kind { cmp, land, lor, lnot, implies } kind = Kind::cmp;
    CmpOp op = CmpOp::eq;
    Term lhs, rhs;
    std::vector<ConstraintExpr> children;

    static ConstraintExpr cmp(CmpOp op, Term a, Term b) {
        ConstraintExpr e;
        e.kind = Kind::cmp;
        e.op = op;
        e.lhs = a;
        e.rhs = b;
        return e;
    }
    static ConstraintExpr combine(Kind k, std::vector<ConstraintExpr> cs) {
        ConstraintExpr e;
        e.kind = k;
        e.children = std::move(cs);
        return e;
    }
};

namespace detail {

// Three-valued evaluation against a fully known input valuation and a
// partially assigned output (-1 = unassigned).
enum class Tri { yes, no, unknown };

inline std::optional<int> term_value(const Term& t, const Valuation* in,
                                     const Valuation& out) {
    if (t.kind == Term::Kind::literal) return t.literal;
    if (t.side == FlowSide::in) {
        if (!in) return std::nullopt;
        return (*in)[t.field];
    }
    if (out[t.field] < 0) return std::nullopt;
    return out[t.field];
}

inline Tri eval(const ConstraintExpr& e, const Valuation* in, const Valuation& out) {
    switch (e.kind) {
        case ConstraintExpr::Kind::cmp: {
            auto a = term_value(e.lhs, in, out);
            auto b = term_value(e.rhs, in, out);
            if (!a || !b) return Tri::unknown;
            bool r = false;
            switch (e.op) {
                case CmpOp::eq: r = *a == *b; break;
                case CmpOp::ne: r = *a != *b; break;
                case CmpOp::lt: r = *a < *b; break;
                case CmpOp::le: r = *a <= *b; break;
                case CmpOp::gt: r = *a > *b; break;
                case CmpOp::ge: r = *a >= *b; break;
            }
            return r ? Tri::yes : Tri::no;
        }
        case ConstraintExpr::Kind::land: {
            bool unknown = false;
            for (const auto& c : e.children) {
                Tri t = eval(c, in, out);
                if (t == Tri::no) return Tri::no;
                if (t == Tri::unknown) unknown = true;
            }
            return unknown ? Tri::unknown : Tri::yes;
        }
        case ConstraintExpr::Kind::lor: {
            bool unknown = false;
            for (const auto& c : e.children) {
                Tri t = eval(c, in, out);
                if (t == Tri::yes) return Tri::yes;
                if (t == Tri::unknown) unknown = true;
            }
            return unknown ? Tri::unknown : Tri::no;
        }
        case ConstraintExpr::Kind::lnot: {
            Tri t = eval(e.children.at(0), in, out);
            if (t == Tri::unknown) return Tri::unknown;
            return t == Tri::yes ? Tri::no : Tri::yes;
        }
        case ConstraintExpr::Kind::implies: {
            Tri a = eval(e.children.at(0), in, out);
            Tri b = eval(e.children.at(1), in, out);
            if (a == Tri::no || b == Tri::yes) return Tri::yes;
            if (a == Tri::unknown || b == Tri::unknown) return Tri::unknown;
            return Tri::no;
        }
    }
    return Tri::unknown;
}

}  // namespace detail

// ---- Actions and models --------------------------------------------------

// Reference rendered into the LTS label of an action instance.
struct OfferRef {
    FlowSide side;
    int field;
};

struct ActionDef {
    std::string name;
    bool has_input = true;
    bool has_output = true;
    bool is_init = false;
    std::vector<ConstraintExpr> constraints;  // includes the implicit initial check
    std::vector<OfferRef> offers;
};

struct ConstraintModel {
    FlowObjectType flow;
    std::vector<ActionDef> actions;
    int init_action = -1;

    const ActionDef& action(const std::string& name) const {
        for (const auto& a : actions)
            if (a.name == name) return a;
        throw std::invalid_argument("unknown action: " + name);
    }
    int action_index(const std::string& name) const {
        for (size_t i = 0; i < actions.size(); ++i)
            if (actions[i].name == name) return static_cast<int>(i);
        return -1;
    }
};

// Enumerates exactly the output valuations accepted by the action's
// constraints for the given input, assigning fields one by one and pruning
// as soon as a constraint is decided false. `initial` is always false on
// the output side. An empty result means the action is disabled.
inline std::vector<Valuation> solve(const FlowObjectType& flow, const ActionDef& a,
                                    const Valuation* in_val,
                                    const std::vector<ConstraintExpr>* extra = nullptr) {
    const int nf = flow.num_fields();
    if (a.has_input && !in_val)
        throw std::invalid_argument("action " + a.name + " requires an input valuation");

    std::vector<const ConstraintExpr*> cs;
    for (const auto& c : a.constraints) cs.push_back(&c);
    if (extra)
        for (const auto& c : *extra) cs.push_back(&c);

    Valuation out(nf, -1);
    out[flow.initial_field()] = 0;  // false

    std::vector<Valuation> results;
    if (!a.has_output) {
        // No output flow: only the input-side constraints matter.
        for (const auto* c : cs)
            if (detail::eval(*c, in_val, out) == detail::Tri::no) return {};
        return {in_val ? *in_val : out};
    }

    std::function<void(int)> assign = [&](int f) {
        for (const auto* c : cs) {
            detail::Tri t = detail::eval(*c, a.has_input ? in_val : nullptr, out);
            if (t == detail::Tri::no) return;
        }
        while (f < nf && out[f] >= 0) ++f;
        if (f == nf) {
            results.push_back(out);
            return;
        }
        const int dom = static_cast<int>(flow.fields[f].domain.values.size());
        for (int v = 0; v < dom; ++v) {
            out[f] = v;
            assign(f + 1);
        }
        out[f] = -1;
    };
    assign(0);
    return results;
}

inline std::vector<Valuation> solve(const ConstraintModel& m, const ActionDef& a,
                                    const Valuation& in_val) {
    return solve(m.flow, a, &in_val);
}

// Label of one fully valued action instance: gate = action name, offers =
// the action's projection, value spellings uppercased to line up with the
// SoC gate vocabulary.
inline Label instance_label(const FlowObjectType& flow, const ActionDef& a,
                            const Valuation* in_val, const Valuation& out_val) {
    Label l;
    l.gate = a.name;
    for (const auto& ref : a.offers) {
        int ord = ref.side == FlowSide::in ? (*in_val)[ref.field] : out_val[ref.field];
        std::string text = flow.fields[ref.field].domain.values.at(ord);
        for (auto& ch : text) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        l.offers.push_back(Value{std::move(text), ord});
    }
    return l;
}

// Reachable-valuation LTS: state 0 is the pre-init state, the init action
// provides the transitions out of it, every other state is a valuation.
inline Lts build_constraint_lts(const ConstraintModel& m,
                                long state_limit = kDefaultStateLimit) {
    if (m.init_action < 0) throw std::invalid_argument("model has no init action");

    std::map<Valuation, int> index;
    std::vector<Valuation> states;
    Lts lts(1, 0);  // pre-init

    auto state_of = [&](const Valuation& v) {
        auto [it, fresh] = index.emplace(v, static_cast<int>(states.size()) + 1);
        if (fresh) {
            states.push_back(v);
            lts.add_state();
            if (static_cast<long>(states.size()) + 1 > state_limit)
                throw ResourceLimitError("build_constraint_lts: state limit exceeded");
        }
        return it->second;
    };

    const ActionDef& init = m.actions[m.init_action];
    for (const auto& out : solve(m.flow, init, nullptr))
        lts.add_transition(0, instance_label(m.flow, init, nullptr, out), state_of(out));

    for (size_t cur = 0; cur < states.size(); ++cur) {
        const Valuation in = states[cur];
        const int from = static_cast<int>(cur) + 1;
        for (size_t ai = 0; ai < m.actions.size(); ++ai) {
            if (static_cast<int>(ai) == m.init_action) continue;
            const ActionDef& a = m.actions[ai];
            for (const auto& out : solve(m.flow, a, &in))
                lts.add_transition(from, instance_label(m.flow, a, &in, out), state_of(out));
        }
    }
    lts.dedupe();
    return lts;
}

// ---- Builtin monolithic resource-isolation model -------------------------

namespace ri {

inline EnumDomain security_domain() { return {"security", {"nonsecure", "secure"}}; }
inline EnumDomain privilege_domain() { return {"privilege", {"nonprivileged", "privileged"}}; }
inline EnumDomain data_domain() { return {"data", {"data1", "data2"}}; }
inline EnumDomain phase_domain() { return {"phase", {"idle", "read", "write", "protection"}}; }

}  // namespace ri

namespace detail {

class ModelBuilder {
public:
    explicit ModelBuilder(ConstraintModel& m) : m_(m) {}

    Term in(const std::string& f) const { return field(FlowSide::in, f); }
    Term out(const std::string& f) const { return field(FlowSide::out, f); }
    Term lit(const std::string& f, const std::string& v) const {
        int fi = m_.flow.field_index(f);
        Term t;
        t.kind = Term::Kind::literal;
        t.literal = m_.flow.fields[fi].domain.ordinal(v);
        t.literal_text = v;
        if (t.literal < 0) throw std::invalid_argument("bad literal " + v + " for " + f);
        return t;
    }

    ActionDef& action(const std::string& name, bool input, bool output, bool init) {
        ActionDef a;
        a.name = name;
        a.has_input = input;
        a.has_output = output;
        a.is_init = init;
        if (!init)  // line-5 pattern: only runnable once the flow was written
            a.constraints.push_back(ConstraintExpr::cmp(
                CmpOp::eq, in("initial"), lit("initial", "false")));
        m_.actions.push_back(std::move(a));
        if (init) m_.init_action = static_cast<int>(m_.actions.size()) - 1;
        return m_.actions.back();
    }

    void require(ActionDef& a, CmpOp op, Term lhs, Term rhs) {
        a.constraints.push_back(ConstraintExpr::cmp(op, lhs, rhs));
    }
    void require(ActionDef& a, ConstraintExpr e) { a.constraints.push_back(std::move(e)); }
    void copy(ActionDef& a, const std::string& f) {
        require(a, CmpOp::eq, out(f), in(f));
    }
    void copy_all_except(ActionDef& a, const std::set<std::string>& touched) {
        for (const auto& f : m_.flow.fields)
            if (f.name != "initial" && !touched.count(f.name)) copy(a, f.name);
    }
    void offer(ActionDef& a, FlowSide side, const std::string& f) {
        a.offers.push_back(OfferRef{side, m_.flow.field_index(f)});
    }

private:
    Term field(FlowSide side, const std::string& f) const {
        int fi = m_.flow.field_index(f);
        if (fi < 0) throw std::invalid_argument("unknown flow field: " + f);
        Term t;
        t.kind = Term::Kind::field;
        t.side = side;
        t.field = fi;
        return t;
    }

    ConstraintModel& m_;
};

}  // namespace detail

// The monolithic model: one state flow object tracking the transaction
// phase and the full SoC configuration; ten actions (three requests, three
// grants, three rejects, the configuration change) plus init_system_state.
inline ConstraintModel monolithic_ri_model() {
    ConstraintModel m;
    m.flow.add_field("sstate", ri::phase_domain());
    m.flow.add_field("ssec", ri::security_domain());
    m.flow.add_field("spriv", ri::privilege_domain());
    m.flow.add_field("sdata", ri::data_domain());
    m.flow.add_field("tsec", ri::security_domain());
    m.flow.add_field("tpriv", ri::privilege_domain());
    m.flow.add_field("tdata", ri::data_domain());
    m.flow.add_field("newsec", ri::security_domain());
    m.flow.add_field("newpriv", ri::privilege_domain());

    detail::ModelBuilder b(m);
    using Op = CmpOp;

    {
        auto& a = b.action("init_system_state", false, true, true);
        b.require(a, Op::eq, b.out("sstate"), b.lit("sstate", "idle"));
        b.require(a, Op::eq, b.out("ssec"), b.lit("ssec", "secure"));
        b.require(a, Op::eq, b.out("spriv"), b.lit("spriv", "privileged"));
        b.require(a, Op::eq, b.out("sdata"), b.lit("sdata", "data1"));
        b.require(a, Op::eq, b.out("tsec"), b.lit("tsec", "nonsecure"));
        b.require(a, Op::eq, b.out("tpriv"), b.lit("tpriv", "nonprivileged"));
        b.require(a, Op::eq, b.out("tdata"), b.lit("tdata", "data1"));
        b.require(a, Op::eq, b.out("newsec"), b.lit("newsec", "nonsecure"));
        b.require(a, Op::eq, b.out("newpriv"), b.lit("newpriv", "nonprivileged"));
    }
    {
        auto& a = b.action("request_read", true, true, false);
        b.require(a, Op::eq, b.in("sstate"), b.lit("sstate", "idle"));
        b.require(a, Op::eq, b.out("sstate"), b.lit("sstate", "read"));
        b.copy_all_except(a, {"sstate"});
        b.offer(a, FlowSide::in, "ssec");
        b.offer(a, FlowSide::in, "spriv");
    }
    {
        auto& a = b.action("request_write", true, true, false);
        b.require(a, Op::eq, b.in("sstate"), b.lit("sstate", "idle"));
        b.require(a, Op::eq, b.out("sstate"), b.lit("sstate", "write"));
        b.copy_all_except(a, {"sstate"});
        b.offer(a, FlowSide::in, "ssec");
        b.offer(a, FlowSide::in, "spriv");
        b.offer(a, FlowSide::in, "sdata");
    }
    {
        // The requested levels are written into the flow; the grant applies
        // them to the target later.
        auto& a = b.action("request_protection", true, true, false);
        b.require(a, Op::eq, b.in("sstate"), b.lit("sstate", "idle"));
        b.require(a, Op::eq, b.out("sstate"), b.lit("sstate", "protection"));
        b.copy_all_except(a, {"sstate", "newsec", "newpriv"});
        b.offer(a, FlowSide::in, "ssec");
        b.offer(a, FlowSide::in, "spriv");
        b.offer(a, FlowSide::out, "newsec");
        b.offer(a, FlowSide::out, "newpriv");
    }
    {
        auto& a = b.action("grant_read", true, true, false);
        b.require(a, Op::eq, b.in("sstate"), b.lit("sstate", "read"));
        b.require(a, Op::eq, b.out("sstate"), b.lit("sstate", "idle"));
        b.require(a, Op::ge, b.in("ssec"), b.in("tsec"));
        b.require(a, Op::ge, b.in("spriv"), b.in("tpriv"));
        b.copy_all_except(a, {"sstate"});
        b.offer(a, FlowSide::in, "tdata");
    }
    {
        auto& a = b.action("reject_read", true, true, false);
        b.require(a, Op::eq, b.in("sstate"), b.lit("sstate", "read"));
        b.require(a, Op::eq, b.out("sstate"), b.lit("sstate", "idle"));
        b.require(a, ConstraintExpr::combine(
                         ConstraintExpr::Kind::lor,
                         {ConstraintExpr::cmp(Op::lt, b.in("ssec"), b.in("tsec")),
                          ConstraintExpr::cmp(Op::lt, b.in("spriv"), b.in("tpriv"))}));
        b.copy_all_except(a, {"sstate"});
    }
    {
        auto& a = b.action("grant_write", true, true, false);
        b.require(a, Op::eq, b.in("sstate"), b.lit("sstate", "write"));
        b.require(a, Op::eq, b.out("sstate"), b.lit("sstate", "idle"));
        b.require(a, Op::ge, b.in("ssec"), b.in("tsec"));
        b.require(a, Op::ge, b.in("spriv"), b.in("tpriv"));
        b.require(a, Op::eq, b.out("tdata"), b.in("sdata"));
        b.copy_all_except(a, {"sstate", "tdata"});
    }
    {
        auto& a = b.action("reject_write", true, true, false);
        b.require(a, Op::eq, b.in("sstate"), b.lit("sstate", "write"));
        b.require(a, Op::eq, b.out("sstate"), b.lit("sstate", "idle"));
        b.require(a, ConstraintExpr::combine(
                         ConstraintExpr::Kind::lor,
                         {ConstraintExpr::cmp(Op::lt, b.in("ssec"), b.in("tsec")),
                          ConstraintExpr::cmp(Op::lt, b.in("spriv"), b.in("tpriv"))}));
        b.copy_all_except(a, {"sstate"});
    }
    {
        auto& a = b.action("grant_protection", true, true, false);
        b.require(a, Op::eq, b.in("sstate"), b.lit("sstate", "protection"));
        b.require(a, Op::eq, b.out("sstate"), b.lit("sstate", "idle"));
        b.require(a, Op::eq, b.in("ssec"), b.lit("ssec", "secure"));
        b.require(a, Op::eq, b.in("spriv"), b.lit("spriv", "privileged"));
        b.require(a, Op::eq, b.out("tsec"), b.in("newsec"));
        b.require(a, Op::eq, b.out("tpriv"), b.in("newpriv"));
        b.copy_all_except(a, {"sstate", "tsec", "tpriv"});
        b.offer(a, FlowSide::in, "newsec");
        b.offer(a, FlowSide::in, "newpriv");
    }
    {
        auto& a = b.action("reject_protection", true, true, false);
        b.require(a, Op::eq, b.in("sstate"), b.lit("sstate", "protection"));
        b.require(a, Op::eq, b.out("sstate"), b.lit("sstate", "idle"));
        b.require(a, ConstraintExpr::combine(
                         ConstraintExpr::Kind::lor,
                         {ConstraintExpr::cmp(Op::eq, b.in("ssec"), b.lit("ssec", "nonsecure")),
                          ConstraintExpr::cmp(Op::eq, b.in("spriv"),
                                              b.lit("spriv", "nonprivileged"))}));
        b.copy_all_except(a, {"sstate"});
    }
    {
        auto& a = b.action("config_change", true, true, false);
        b.require(a, Op::eq, b.in("sstate"), b.lit("sstate", "idle"));
        b.require(a, Op::eq, b.out("sstate"), b.lit("sstate", "idle"));
        b.copy_all_except(a, {"sstate", "ssec", "spriv", "sdata"});
        b.offer(a, FlowSide::out, "ssec");
        b.offer(a, FlowSide::out, "spriv");
        b.offer(a, FlowSide::out, "sdata");
    }
    return m;
}

// Gate mapping from monolithic action names to the SoC vocabulary;
// config_change and init become internal. Feeding the result through
// determinize yields the LTS compared against the SoC models.
inline Lts relabel_to_soc_vocabulary(const Lts& constraint_lts) {
    static const std::map<std::string, std::string> gate_map{
        {"request_read", "READ"},
        {"request_write", "WRITE"},
        {"request_protection", "PROTECTION"},
        {"grant_read", "GRANT_READ"},
        {"grant_write", "GRANT_WRITE"},
        {"grant_protection", "GRANT_PROTECTION"},
        {"reject_read", "REJECT_READ"},
        {"reject_write", "REJECT_WRITE"},
        {"reject_protection", "REJECT_PROTECTION"},
    };
    return rename_labels(constraint_lts, [](const Label& lab) -> Label {
        if (lab.is_tau()) return lab;
        if (lab.gate == "config_change" || lab.gate == "init_system_state")
            return tau_label();
        auto it = gate_map.find(lab.gate);
        if (it == gate_map.end())
            throw std::invalid_argument("no SoC gate for action " + lab.gate);
        Label out = lab;
        out.gate = it->second;
        return out;
    });
}

}  // namespace isoltest
