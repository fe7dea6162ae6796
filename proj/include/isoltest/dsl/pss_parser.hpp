#pragma once

#include "isoltest/dsl/lexer.hpp"
#include "isoltest/infer.hpp"

namespace isoltest::dsl {

// Constraint-model DSL:
//
//   component NAME {
//     enum DOMAIN { value, ... }
//     flow object TYPE { DOMAIN field; ... }      // `initial` is implicit
//     action NAME {
//       [init;]
//       [input TYPE in;]
//       [output TYPE out;]
//       constraint EXPR;
//       [offer in.field, out.field, ...;]
//     }
//   }
//
// Expressions: comparisons between `in.field` / `out.field` terms and enum
// literals, combined with and/or/not/->; every comparison is type-checked
// against the field domains.
//
// Verification-intent DSL (parsed against a model):
//
//   intent NAME {
//     handle NAME : ACTION [where EXPR];
//     activity { STMT* }          // statements sequence; `h;` is a leaf,
//                                 // select {..} or {..} / schedule {..} and {..}
//     bind NAME -> NAME;
//   }

namespace pss_detail {

inline const char* cmp_text(CmpOp op) {
    switch (op) {
        case CmpOp::eq: return "==";
        case CmpOp::ne: return "!=";
        case CmpOp::lt: return "<";
        case CmpOp::le: return "<=";
        case CmpOp::gt: return ">";
        case CmpOp::ge: return ">=";
    }
    return "?";
}

inline std::optional<CmpOp> cmp_from_text(const std::string& s) {
    if (s == "==") return CmpOp::eq;
    if (s == "!=") return CmpOp::ne;
    if (s == "<") return CmpOp::lt;
    if (s == "<=") return CmpOp::le;
    if (s == ">") return CmpOp::gt;
    if (s == ">=") return CmpOp::ge;
    return std::nullopt;
}

// Unresolved comparison operand; literals are resolved against the field on
// the other side of the comparison.
struct RawTerm {
    bool is_field = false;
    FlowSide side = FlowSide::in;
    std::string field;    // field name
    std::string literal;  // literal spelling
    SourceSpan span;
};

class ExprParser {
public:
    ExprParser(Lexer& lx, const FlowObjectType& flow) : lx_(lx), flow_(flow) {}

    ConstraintExpr parse() { return implies(); }

private:
    ConstraintExpr implies() {
        ConstraintExpr lhs = lor();
        if (!lx_.accept("->")) return lhs;
        ConstraintExpr rhs = implies();
        return ConstraintExpr::combine(ConstraintExpr::Kind::implies,
                                       {std::move(lhs), std::move(rhs)});
    }
    ConstraintExpr lor() {
        ConstraintExpr e = land();
        if (!lx_.peek().is("or") && !lx_.peek().is("||")) return e;
        std::vector<ConstraintExpr> cs{std::move(e)};
        while (lx_.accept("or") || lx_.accept("||")) cs.push_back(land());
        return ConstraintExpr::combine(ConstraintExpr::Kind::lor, std::move(cs));
    }
    ConstraintExpr land() {
        ConstraintExpr e = atom();
        if (!lx_.peek().is("and") && !lx_.peek().is("&&")) return e;
        std::vector<ConstraintExpr> cs{std::move(e)};
        while (lx_.accept("and") || lx_.accept("&&")) cs.push_back(atom());
        return ConstraintExpr::combine(ConstraintExpr::Kind::land, std::move(cs));
    }
    ConstraintExpr atom() {
        if (lx_.accept("not") || lx_.accept("!"))
            return ConstraintExpr::combine(ConstraintExpr::Kind::lnot, {atom()});
        if (lx_.accept("(")) {
            ConstraintExpr e = implies();
            lx_.expect(")");
            return e;
        }
        RawTerm lhs = term();
        Token op = lx_.next();
        auto cmp = cmp_from_text(op.text);
        if (!cmp) lx_.fail_at(op.span, "expected a comparison operator");
        RawTerm rhs = term();
        return resolve(*cmp, lhs, rhs);
    }

    RawTerm term() {
        RawTerm t;
        Token tok = lx_.expect_ident();
        t.span = tok.span;
        if ((tok.text == "in" || tok.text == "out") && lx_.accept(".")) {
            t.is_field = true;
            t.side = tok.text == "in" ? FlowSide::in : FlowSide::out;
            t.field = lx_.expect_ident().text;
            if (flow_.field_index(t.field) < 0)
                lx_.fail_at(t.span, "unknown flow field '" + t.field + "'");
        } else {
            t.literal = tok.text;
        }
        return t;
    }

    ConstraintExpr resolve(CmpOp op, const RawTerm& a, const RawTerm& b) {
        if (!a.is_field && !b.is_field)
            lx_.fail_at(a.span, "comparison needs at least one flow field");
        auto field_term = [&](const RawTerm& t) {
            Term r;
            r.kind = Term::Kind::field;
            r.side = t.side;
            r.field = flow_.field_index(t.field);
            return r;
        };
        auto literal_term = [&](const RawTerm& lit, const RawTerm& against) {
            const auto& dom = flow_.fields[flow_.field_index(against.field)].domain;
            int ord = dom.ordinal(lit.literal);
            if (ord < 0)
                lx_.fail_at(lit.span, "'" + lit.literal + "' is not a value of domain '" +
                                          dom.name + "' (field '" + against.field + "')");
            Term r;
            r.kind = Term::Kind::literal;
            r.literal = ord;
            r.literal_text = lit.literal;
            return r;
        };
        if (a.is_field && b.is_field) {
            const auto& da = flow_.fields[flow_.field_index(a.field)].domain;
            const auto& db = flow_.fields[flow_.field_index(b.field)].domain;
            if (da.name != db.name)
                lx_.fail_at(b.span, "domain mismatch: '" + a.field + "' is " + da.name +
                                        " but '" + b.field + "' is " + db.name);
            return ConstraintExpr::cmp(op, field_term(a), field_term(b));
        }
        if (a.is_field) return ConstraintExpr::cmp(op, field_term(a), literal_term(b, a));
        return ConstraintExpr::cmp(op, literal_term(a, b), field_term(b));
    }

    Lexer& lx_;
    const FlowObjectType& flow_;
};

}  // namespace pss_detail

// ---- Model parsing -------------------------------------------------------

inline ConstraintModel parse_pss_model(const std::string& text,
                                       const std::string& file = "<input>") {
    Lexer lx(text, file);
    if (lx.at_eof()) lx.fail("empty input: expected 'component'");
    lx.expect("component");
    lx.expect_ident();
    lx.expect("{");

    ConstraintModel m;
    std::map<std::string, EnumDomain> enums;
    bool flow_seen = false;

    while (!lx.accept("}")) {
        if (lx.accept("enum")) {
            EnumDomain d;
            Token name = lx.expect_ident();
            d.name = name.text;
            if (enums.count(d.name)) lx.fail_at(name.span, "duplicate enum '" + d.name + "'");
            lx.expect("{");
            d.values.push_back(lx.expect_ident().text);
            while (lx.accept(",")) d.values.push_back(lx.expect_ident().text);
            lx.expect("}");
            enums.emplace(d.name, std::move(d));
        } else if (lx.accept("flow")) {
            lx.expect("object");
            lx.expect_ident();
            if (flow_seen) lx.fail("only one flow object type is supported");
            flow_seen = true;
            lx.expect("{");
            while (!lx.accept("}")) {
                Token dom = lx.expect_ident();
                auto it = enums.find(dom.text);
                if (it == enums.end())
                    lx.fail_at(dom.span, "unknown domain '" + dom.text + "'");
                Token fname = lx.expect_ident();
                lx.expect(";");
                if (m.flow.field_index(fname.text) >= 0)
                    lx.fail_at(fname.span, "duplicate flow field '" + fname.text + "'");
                m.flow.add_field(fname.text, it->second);
            }
        } else if (lx.accept("action")) {
            if (!flow_seen) lx.fail("flow object must be declared before actions");
            ActionDef a;
            Token name = lx.expect_ident();
            a.name = name.text;
            if (m.action_index(a.name) >= 0)
                lx.fail_at(name.span, "duplicate action '" + a.name + "'");
            a.has_input = a.has_output = false;
            lx.expect("{");
            while (!lx.accept("}")) {
                if (lx.accept("init")) {
                    lx.expect(";");
                    if (m.init_action >= 0)
                        lx.fail_at(name.span, "multiple init actions ('" +
                                                  m.actions[m.init_action].name + "' and '" +
                                                  a.name + "')");
                    a.is_init = true;
                    m.init_action = static_cast<int>(m.actions.size());
                } else if (lx.accept("input")) {
                    lx.expect_ident();
                    lx.expect("in");
                    lx.expect(";");
                    a.has_input = true;
                } else if (lx.accept("output")) {
                    lx.expect_ident();
                    lx.expect("out");
                    lx.expect(";");
                    a.has_output = true;
                } else if (lx.accept("constraint")) {
                    a.constraints.push_back(pss_detail::ExprParser(lx, m.flow).parse());
                    lx.expect(";");
                } else if (lx.accept("offer")) {
                    do {
                        Token side = lx.expect_ident();
                        if (side.text != "in" && side.text != "out")
                            lx.fail_at(side.span, "offers must be in.field or out.field");
                        lx.expect(".");
                        Token f = lx.expect_ident();
                        int fi = m.flow.field_index(f.text);
                        if (fi < 0) lx.fail_at(f.span, "unknown flow field '" + f.text + "'");
                        a.offers.push_back(OfferRef{
                            side.text == "in" ? FlowSide::in : FlowSide::out, fi});
                    } while (lx.accept(","));
                    lx.expect(";");
                } else {
                    lx.fail("expected init / input / output / constraint / offer");
                }
            }
            if (a.is_init && a.has_input)
                lx.fail_at(name.span, "an init action cannot take an input flow");
            m.actions.push_back(std::move(a));
        } else {
            lx.fail("expected enum / flow / action");
        }
    }
    if (!lx.at_eof()) lx.fail("trailing input after component block");
    if (m.init_action < 0) lx.fail("model declares no init action");
    return m;
}

// ---- Intent parsing ------------------------------------------------------

namespace pss_detail {

inline ActivityNode parse_block(Lexer& lx, const VerificationIntent& vi);

inline ActivityNode parse_activity_stmt(Lexer& lx, const VerificationIntent& vi) {
    if (lx.accept("select")) {
        std::vector<ActivityNode> branches{parse_block(lx, vi)};
        while (lx.accept("or")) branches.push_back(parse_block(lx, vi));
        if (branches.size() < 2) lx.fail("select needs at least two 'or' branches");
        return ActivityNode::node(ActivityNode::Kind::select, std::move(branches));
    }
    if (lx.accept("schedule")) {
        std::vector<ActivityNode> branches{parse_block(lx, vi)};
        while (lx.accept("and")) branches.push_back(parse_block(lx, vi));
        if (branches.size() < 2) lx.fail("schedule needs at least two 'and' branches");
        return ActivityNode::node(ActivityNode::Kind::schedule, std::move(branches));
    }
    Token h = lx.expect_ident();
    int idx = vi.handle_index(h.text);
    if (idx < 0) lx.fail_at(h.span, "unknown handle '" + h.text + "'");
    lx.expect(";");
    return ActivityNode::leaf(idx);
}

inline ActivityNode parse_block(Lexer& lx, const VerificationIntent& vi) {
    lx.expect("{");
    std::vector<ActivityNode> stmts;
    while (!lx.accept("}")) stmts.push_back(parse_activity_stmt(lx, vi));
    if (stmts.empty()) lx.fail("empty activity block");
    if (stmts.size() == 1) return std::move(stmts[0]);
    return ActivityNode::node(ActivityNode::Kind::sequence, std::move(stmts));
}

// Splits a top-level conjunction into the handle's constraint list.
inline std::vector<ConstraintExpr> split_conjuncts(ConstraintExpr e) {
    if (e.kind != ConstraintExpr::Kind::land) return {std::move(e)};
    return std::move(e.children);
}

}  // namespace pss_detail

inline VerificationIntent parse_vi(const std::string& text, const ConstraintModel& model,
                                   const std::string& file = "<input>") {
    Lexer lx(text, file);
    if (lx.at_eof()) lx.fail("empty input: expected 'intent'");
    lx.expect("intent");
    VerificationIntent vi;
    vi.name = lx.expect_ident().text;
    lx.expect("{");
    bool activity_seen = false;
    while (!lx.accept("}")) {
        if (lx.accept("handle")) {
            ViHandle h;
            Token name = lx.expect_ident();
            h.name = name.text;
            if (vi.handle_index(h.name) >= 0)
                lx.fail_at(name.span, "duplicate handle '" + h.name + "'");
            lx.expect(":");
            Token act = lx.expect_ident();
            h.action = model.action_index(act.text);
            if (h.action < 0) lx.fail_at(act.span, "unknown action '" + act.text + "'");
            if (lx.accept("where"))
                h.constraints = pss_detail::split_conjuncts(
                    pss_detail::ExprParser(lx, model.flow).parse());
            lx.expect(";");
            vi.handles.push_back(std::move(h));
        } else if (lx.accept("activity")) {
            if (activity_seen) lx.fail("multiple activity blocks");
            activity_seen = true;
            vi.activity = pss_detail::parse_block(lx, vi);
        } else if (lx.accept("bind")) {
            Token a = lx.expect_ident();
            lx.expect("->");
            Token b = lx.expect_ident();
            lx.expect(";");
            int ia = vi.handle_index(a.text), ib = vi.handle_index(b.text);
            if (ia < 0) lx.fail_at(a.span, "unknown handle '" + a.text + "'");
            if (ib < 0) lx.fail_at(b.span, "unknown handle '" + b.text + "'");
            vi.binds.emplace_back(ia, ib);
        } else {
            lx.fail("expected handle / activity / bind");
        }
    }
    if (!lx.at_eof()) lx.fail("trailing input after intent block");
    if (!activity_seen) lx.fail("intent declares no activity");
    try {
        validate_binds(vi);
    } catch (const std::invalid_argument& e) {
        lx.fail(e.what());
    }
    return vi;
}

// ---- Unparsing -----------------------------------------------------------

namespace pss_detail {

inline std::string unparse_term(const FlowObjectType& flow, const Term& t) {
    if (t.kind == Term::Kind::literal) return t.literal_text;
    return std::string(t.side == FlowSide::in ? "in." : "out.") + flow.fields[t.field].name;
}

inline std::string unparse_expr(const FlowObjectType& flow, const ConstraintExpr& e,
                                bool parenthesize = false) {
    switch (e.kind) {
        case ConstraintExpr::Kind::cmp:
            return unparse_term(flow, e.lhs) + " " + cmp_text(e.op) + " " +
                   unparse_term(flow, e.rhs);
        case ConstraintExpr::Kind::land:
        case ConstraintExpr::Kind::lor: {
            const char* sep = e.kind == ConstraintExpr::Kind::land ? " and " : " or ";
            std::string s;
            for (size_t i = 0; i < e.children.size(); ++i) {
                if (i) s += sep;
                bool sub = e.children[i].kind != ConstraintExpr::Kind::cmp;
                s += unparse_expr(flow, e.children[i], sub);
            }
            return parenthesize ? "(" + s + ")" : s;
        }
        case ConstraintExpr::Kind::lnot:
            return "not " + unparse_expr(flow, e.children.at(0), true);
        case ConstraintExpr::Kind::implies: {
            std::string s = unparse_expr(flow, e.children.at(0),
                                         e.children[0].kind != ConstraintExpr::Kind::cmp) +
                            " -> " + unparse_expr(flow, e.children.at(1),
                                                  e.children[1].kind != ConstraintExpr::Kind::cmp);
            return parenthesize ? "(" + s + ")" : s;
        }
    }
    return {};
}

inline void unparse_activity(const VerificationIntent& vi, const ActivityNode& n,
                             std::string& out, int indent) {
    std::string pad(indent * 2, ' ');
    switch (n.kind) {
        case ActivityNode::Kind::leaf:
            out += pad + vi.handles[n.handle].name + ";\n";
            return;
        case ActivityNode::Kind::sequence:
            for (const auto& c : n.children) unparse_activity(vi, c, out, indent);
            return;
        case ActivityNode::Kind::select:
        case ActivityNode::Kind::schedule: {
            const char* head = n.kind == ActivityNode::Kind::select ? "select" : "schedule";
            const char* sep = n.kind == ActivityNode::Kind::select ? "or" : "and";
            out += pad + head + " {\n";
            for (size_t i = 0; i < n.children.size(); ++i) {
                if (i) out += pad + "} " + sep + " {\n";
                unparse_activity(vi, n.children[i], out, indent + 1);
            }
            out += pad + "}\n";
            return;
        }
    }
}

}  // namespace pss_detail

inline std::string unparse_pss_model(const ConstraintModel& m,
                                     const std::string& component = "ri",
                                     const std::string& flow_type = "system_state") {
    std::string out = "component " + component + " {\n";
    std::vector<std::string> emitted;
    for (const auto& f : m.flow.fields) {
        if (f.name == "initial") continue;
        if (std::find(emitted.begin(), emitted.end(), f.domain.name) != emitted.end()) continue;
        emitted.push_back(f.domain.name);
        out += "  enum " + f.domain.name + " { ";
        for (size_t i = 0; i < f.domain.values.size(); ++i) {
            if (i) out += ", ";
            out += f.domain.values[i];
        }
        out += " }\n";
    }
    out += "\n  flow object " + flow_type + " {\n";
    for (const auto& f : m.flow.fields)
        if (f.name != "initial") out += "    " + f.domain.name + " " + f.name + ";\n";
    out += "  }\n";
    for (const auto& a : m.actions) {
        out += "\n  action " + a.name + " {\n";
        if (a.is_init) out += "    init;\n";
        if (a.has_input) out += "    input " + flow_type + " in;\n";
        if (a.has_output) out += "    output " + flow_type + " out;\n";
        for (const auto& c : a.constraints)
            out += "    constraint " + pss_detail::unparse_expr(m.flow, c) + ";\n";
        if (!a.offers.empty()) {
            out += "    offer ";
            for (size_t i = 0; i < a.offers.size(); ++i) {
                if (i) out += ", ";
                out += (a.offers[i].side == FlowSide::in ? "in." : "out.") +
                       m.flow.fields[a.offers[i].field].name;
            }
            out += ";\n";
        }
        out += "  }\n";
    }
    out += "}\n";
    return out;
}

inline std::string unparse_vi(const VerificationIntent& vi, const ConstraintModel& m) {
    std::string out = "intent " + vi.name + " {\n";
    for (const auto& h : vi.handles) {
        out += "  handle " + h.name + " : " + m.actions[h.action].name;
        if (!h.constraints.empty()) {
            out += " where ";
            for (size_t i = 0; i < h.constraints.size(); ++i) {
                if (i) out += " and ";
                bool sub = h.constraints[i].kind != ConstraintExpr::Kind::cmp;
                out += pss_detail::unparse_expr(m.flow, h.constraints[i], sub);
            }
        }
        out += ";\n";
    }
    out += "  activity {\n";
    pss_detail::unparse_activity(vi, vi.activity, out, 2);
    out += "  }\n";
    for (const auto& [a, b] : vi.binds)
        out += "  bind " + vi.handles[a].name + " -> " + vi.handles[b].name + ";\n";
    out += "}\n";
    return out;
}

}  // namespace isoltest::dsl
