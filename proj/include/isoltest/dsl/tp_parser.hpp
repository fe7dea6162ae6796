#pragma once

#include "isoltest/aut.hpp"
#include "isoltest/dsl/lexer.hpp"
#include "isoltest/tp.hpp"

namespace isoltest::dsl {

// Test-purpose DSL:
//
//   purpose NAME {
//     match GATE(offer, ...) [where guard]
//     select { stmts } or { stmts } ...
//     schedule { stmts } and { stmts } ...
//     forbid GATE(offer, ...) [, GATE(...)]* { stmts }
//     accept
//   }
//
// Offers are literals (SECURE, DATA1, 3), wildcards (_), or captures (?x).
// Guards compare captured variables and literals; a bare identifier is a
// variable if some earlier capture declared it, a literal otherwise.
// `accept` must close the top-level block; `forbid` refuses its patterns
// at every state strictly inside its body.

struct TpStmt {
    enum class Kind { match, select, schedule, forbid, accept } kind = Kind::accept;
    LabelPattern pattern;                     // match
    std::optional<GuardExpr> guard;           // match
    std::vector<LabelPattern> forbidden;      // forbid
    std::vector<std::vector<TpStmt>> blocks;  // select/schedule branches; forbid body
};

struct TpAst {
    std::string name;
    std::vector<TpStmt> body;
};

// ---- Parsing -------------------------------------------------------------

namespace tp_detail {

class Parser {
public:
    explicit Parser(Lexer& lx) : lx_(lx) {}

    TpAst parse() {
        if (lx_.at_eof()) lx_.fail("empty input: expected 'purpose'");
        lx_.expect("purpose");
        TpAst ast;
        ast.name = lx_.expect_ident().text;
        lx_.expect("{");
        ast.body = stmts_until("}");
        lx_.expect("}");
        if (!lx_.at_eof()) lx_.fail("trailing input after purpose block");
        if (ast.body.empty() || ast.body.back().kind != TpStmt::Kind::accept)
            lx_.fail("purpose body must end with 'accept'");
        return ast;
    }

private:
    std::vector<TpStmt> stmts_until(const std::string& closer) {
        std::vector<TpStmt> out;
        while (!lx_.peek().is(closer)) {
            if (lx_.at_eof()) lx_.fail("expected '" + closer + "'");
            out.push_back(stmt());
        }
        return out;
    }

    TpStmt stmt() {
        TpStmt s;
        if (lx_.accept("accept")) {
            s.kind = TpStmt::Kind::accept;
            return s;
        }
        if (lx_.accept("match")) {
            s.kind = TpStmt::Kind::match;
            s.pattern = pattern();
            if (lx_.accept("where")) s.guard = guard_or();
            return s;
        }
        if (lx_.accept("select")) {
            s.kind = TpStmt::Kind::select;
            s.blocks.push_back(block());
            while (lx_.accept("or")) s.blocks.push_back(block());
            if (s.blocks.size() < 2) lx_.fail("select needs at least two 'or' branches");
            return s;
        }
        if (lx_.accept("schedule")) {
            s.kind = TpStmt::Kind::schedule;
            s.blocks.push_back(block());
            while (lx_.accept("and")) s.blocks.push_back(block());
            if (s.blocks.size() < 2) lx_.fail("schedule needs at least two 'and' branches");
            return s;
        }
        if (lx_.accept("forbid")) {
            s.kind = TpStmt::Kind::forbid;
            s.forbidden.push_back(pattern());
            while (lx_.accept(",")) s.forbidden.push_back(pattern());
            s.blocks.push_back(block());
            return s;
        }
        lx_.fail("expected a statement (match / select / schedule / forbid / accept)");
    }

    std::vector<TpStmt> block() {
        lx_.expect("{");
        auto body = stmts_until("}");
        lx_.expect("}");
        for (const auto& st : body)
            if (st.kind == TpStmt::Kind::accept)
                lx_.fail("'accept' is only allowed at the end of the purpose body");
        return body;
    }

    LabelPattern pattern() {
        LabelPattern p;
        p.gate = lx_.expect_ident().text;
        lx_.expect("(");
        if (!lx_.peek().is(")")) {
            p.offers.push_back(offer());
            while (lx_.accept(",")) p.offers.push_back(offer());
        }
        lx_.expect(")");
        return p;
    }

    OfferPattern offer() {
        OfferPattern o;
        if (lx_.accept("_")) {
            o.kind = OfferPattern::Kind::wildcard;
            return o;
        }
        if (lx_.accept("?")) {
            o.kind = OfferPattern::Kind::capture;
            o.var = lx_.expect_ident().text;
            captures_.insert(o.var);
            return o;
        }
        o.kind = OfferPattern::Kind::literal;
        Token t = lx_.next();
        if (t.kind != Token::Kind::ident && t.kind != Token::Kind::number)
            lx_.fail_at(t.span, "expected an offer (literal, '_' or '?var')");
        o.literal = Value{t.text, builtin_ordinal(t.text)};
        return o;
    }

    GuardExpr guard_or() {
        GuardExpr e = guard_and();
        if (!lx_.peek().is("or")) return e;
        GuardExpr o;
        o.kind = GuardExpr::Kind::lor;
        o.children.push_back(std::move(e));
        while (lx_.accept("or")) o.children.push_back(guard_and());
        return o;
    }

    GuardExpr guard_and() {
        GuardExpr e = guard_atom();
        if (!lx_.peek().is("and")) return e;
        GuardExpr a;
        a.kind = GuardExpr::Kind::land;
        a.children.push_back(std::move(e));
        while (lx_.accept("and")) a.children.push_back(guard_atom());
        return a;
    }

    GuardExpr guard_atom() {
        if (lx_.accept("not")) {
            GuardExpr n;
            n.kind = GuardExpr::Kind::lnot;
            n.children.push_back(guard_atom());
            return n;
        }
        if (lx_.accept("(")) {
            GuardExpr e = guard_or();
            lx_.expect(")");
            return e;
        }
        GuardExpr c;
        c.kind = GuardExpr::Kind::cmp;
        c.lhs = guard_term();
        Token op = lx_.next();
        static const std::set<std::string> ops{"==", "!=", "<", "<=", ">", ">="};
        if (!ops.count(op.text)) lx_.fail_at(op.span, "expected a comparison operator");
        c.op = op.text;
        c.rhs = guard_term();
        return c;
    }

    GuardTerm guard_term() {
        Token t = lx_.next();
        if (t.kind != Token::Kind::ident && t.kind != Token::Kind::number)
            lx_.fail_at(t.span, "expected a variable or literal in guard");
        GuardTerm g;
        if (t.kind == Token::Kind::ident && captures_.count(t.text)) {
            g.is_var = true;
            g.var = t.text;
        } else if (t.kind == Token::Kind::ident &&
                   std::islower(static_cast<unsigned char>(t.text[0]))) {
            lx_.fail_at(t.span, "guard references unbound capture variable '" + t.text + "'");
        } else {
            g.literal = Value{t.text, builtin_ordinal(t.text)};
        }
        return g;
    }

    Lexer& lx_;
    std::set<std::string> captures_;
};

// ---- Compilation to the purpose automaton --------------------------------

// Epsilon-free fragment; refusal patterns hang off states.
struct Frag {
    int n = 1;
    int start = 0;
    std::set<int> finals{0};
    std::vector<TpTransition> trans;
    std::map<int, std::vector<LabelPattern>> refuse;
};

inline Frag frag_seq(Frag acc, Frag next) {
    Frag merged;
    merged.n = acc.n + next.n;
    merged.start = acc.start;
    merged.trans = acc.trans;
    merged.refuse = acc.refuse;
    int off = acc.n;
    for (auto t : next.trans) {
        int from = t.from + off;
        t.to += off;
        t.from = from;
        merged.trans.push_back(t);
        if (from - off == next.start)
            for (int fin : acc.finals) {
                TpTransition copy = t;
                copy.from = fin;
                merged.trans.push_back(copy);
            }
    }
    for (auto& [s, pats] : next.refuse) {
        auto& dst = merged.refuse[s + off];
        dst.insert(dst.end(), pats.begin(), pats.end());
        if (s == next.start)
            for (int fin : acc.finals) {
                auto& d2 = merged.refuse[fin];
                d2.insert(d2.end(), pats.begin(), pats.end());
            }
    }
    merged.finals.clear();
    for (int fin : next.finals) merged.finals.insert(fin + off);
    if (next.finals.count(next.start))
        for (int fin : acc.finals) merged.finals.insert(fin);
    return merged;
}

inline Frag compile_stmts(const std::vector<TpStmt>& stmts);

inline Frag compile_stmt(const TpStmt& s) {
    switch (s.kind) {
        case TpStmt::Kind::accept:
            return Frag{};  // handled by the caller; behaves as an empty step
        case TpStmt::Kind::match: {
            Frag f;
            f.n = 2;
            f.finals = {1};
            f.trans.push_back(TpTransition{TpTransition::Kind::match, 0, 1, s.pattern, s.guard});
            return f;
        }
        case TpStmt::Kind::select: {
            Frag merged;
            merged.n = 1;  // shared start
            merged.finals.clear();
            for (const auto& b : s.blocks) {
                Frag sub = compile_stmts(b);
                int off = merged.n;
                merged.n += sub.n;
                for (auto t : sub.trans) {
                    int from = t.from;
                    t.from += off;
                    t.to += off;
                    merged.trans.push_back(t);
                    if (from == sub.start) {
                        TpTransition copy = t;
                        copy.from = 0;
                        merged.trans.push_back(copy);
                    }
                }
                for (auto& [st, pats] : sub.refuse) {
                    auto& dst = merged.refuse[st + off];
                    dst.insert(dst.end(), pats.begin(), pats.end());
                    if (st == sub.start) {
                        auto& d2 = merged.refuse[0];
                        d2.insert(d2.end(), pats.begin(), pats.end());
                    }
                }
                for (int fin : sub.finals) merged.finals.insert(fin + off);
                if (sub.finals.count(sub.start)) merged.finals.insert(0);
            }
            return merged;
        }
        case TpStmt::Kind::schedule: {
            std::vector<Frag> subs;
            for (const auto& b : s.blocks) subs.push_back(compile_stmts(b));
            std::map<std::vector<int>, int> index;
            std::vector<std::vector<int>> tuples;
            std::vector<int> start;
            for (auto& f : subs) start.push_back(f.start);
            index.emplace(start, 0);
            tuples.push_back(start);
            Frag out;
            out.finals.clear();
            auto state_of = [&](const std::vector<int>& t) {
                auto [it, fresh] = index.emplace(t, static_cast<int>(tuples.size()));
                if (fresh) {
                    tuples.push_back(t);
                    ++out.n;
                }
                return it->second;
            };
            for (size_t cur = 0; cur < tuples.size(); ++cur) {
                const std::vector<int> tuple = tuples[cur];
                bool all_final = true;
                for (size_t b = 0; b < subs.size(); ++b) {
                    if (!subs[b].finals.count(tuple[b])) all_final = false;
                    auto rit = subs[b].refuse.find(tuple[b]);
                    if (rit != subs[b].refuse.end()) {
                        auto& dst = out.refuse[static_cast<int>(cur)];
                        dst.insert(dst.end(), rit->second.begin(), rit->second.end());
                    }
                    for (auto t : subs[b].trans) {
                        if (t.from != tuple[b]) continue;
                        std::vector<int> nxt = tuple;
                        nxt[b] = t.to;
                        t.from = static_cast<int>(cur);
                        t.to = state_of(nxt);
                        out.trans.push_back(t);
                    }
                }
                if (all_final) out.finals.insert(static_cast<int>(cur));
            }
            return out;
        }
        case TpStmt::Kind::forbid: {
            Frag body = compile_stmts(s.blocks.at(0));
            for (int st = 0; st < body.n; ++st) {
                if (body.finals.count(st)) continue;  // the exit may see them again
                auto& dst = body.refuse[st];
                dst.insert(dst.end(), s.forbidden.begin(), s.forbidden.end());
            }
            return body;
        }
    }
    throw std::logic_error("unreachable");
}

inline Frag compile_stmts(const std::vector<TpStmt>& stmts) {
    Frag acc;  // empty fragment: single final start state
    for (const auto& s : stmts) {
        if (s.kind == TpStmt::Kind::accept) continue;
        acc = frag_seq(std::move(acc), compile_stmt(s));
    }
    return acc;
}

}  // namespace tp_detail

inline TestPurpose compile_tp(const TpAst& ast) {
    tp_detail::Frag f = tp_detail::compile_stmts(ast.body);
    TestPurpose tp;
    tp.name = ast.name;
    tp.n_states = f.n;
    tp.initial = f.start;
    tp.accept = f.finals;
    tp.transitions = f.trans;
    for (auto& [s, pats] : f.refuse)
        for (auto& p : pats)
            tp.transitions.push_back(TpTransition{TpTransition::Kind::refuse, s, -1, p, {}});
    return tp;
}

inline TpAst parse_tp_ast(const std::string& text, const std::string& file = "<input>") {
    Lexer lx(text, file);
    return tp_detail::Parser(lx).parse();
}

inline TestPurpose parse_tp(const std::string& text, const std::string& file = "<input>") {
    return compile_tp(parse_tp_ast(text, file));
}

// ---- Unparsing -----------------------------------------------------------

namespace tp_detail {

inline std::string unparse(const LabelPattern& p) {
    std::string s = p.gate + "(";
    for (size_t i = 0; i < p.offers.size(); ++i) {
        if (i) s += ", ";
        const auto& o = p.offers[i];
        switch (o.kind) {
            case OfferPattern::Kind::wildcard: s += "_"; break;
            case OfferPattern::Kind::capture: s += "?" + o.var; break;
            case OfferPattern::Kind::literal: s += o.literal.text; break;
        }
    }
    return s + ")";
}

inline std::string unparse(const GuardTerm& t) {
    return t.is_var ? t.var : t.literal.text;
}

inline std::string unparse(const GuardExpr& g, bool parenthesize = false) {
    std::string s;
    switch (g.kind) {
        case GuardExpr::Kind::cmp:
            s = unparse(g.lhs) + " " + g.op + " " + unparse(g.rhs);
            return s;
        case GuardExpr::Kind::land:
        case GuardExpr::Kind::lor: {
            const char* sep = g.kind == GuardExpr::Kind::land ? " and " : " or ";
            for (size_t i = 0; i < g.children.size(); ++i) {
                if (i) s += sep;
                bool sub_paren = g.children[i].kind == GuardExpr::Kind::land ||
                                 g.children[i].kind == GuardExpr::Kind::lor;
                s += unparse(g.children[i], sub_paren);
            }
            return parenthesize ? "(" + s + ")" : s;
        }
        case GuardExpr::Kind::lnot:
            return "not " + unparse(g.children.at(0), true);
    }
    return s;
}

inline void unparse_stmts(const std::vector<TpStmt>& stmts, std::string& out, int indent);

inline void unparse_stmt(const TpStmt& s, std::string& out, int indent) {
    std::string pad(indent * 2, ' ');
    switch (s.kind) {
        case TpStmt::Kind::accept:
            out += pad + "accept\n";
            return;
        case TpStmt::Kind::match:
            out += pad + "match " + unparse(s.pattern);
            if (s.guard) out += " where " + unparse(*s.guard);
            out += "\n";
            return;
        case TpStmt::Kind::select:
        case TpStmt::Kind::schedule: {
            const char* head = s.kind == TpStmt::Kind::select ? "select" : "schedule";
            const char* sep = s.kind == TpStmt::Kind::select ? "or" : "and";
            out += pad + head + " {\n";
            for (size_t i = 0; i < s.blocks.size(); ++i) {
                if (i) out += pad + "} " + sep + " {\n";
                unparse_stmts(s.blocks[i], out, indent + 1);
            }
            out += pad + "}\n";
            return;
        }
        case TpStmt::Kind::forbid: {
            out += pad + "forbid ";
            for (size_t i = 0; i < s.forbidden.size(); ++i) {
                if (i) out += ", ";
                out += unparse(s.forbidden[i]);
            }
            out += " {\n";
            unparse_stmts(s.blocks.at(0), out, indent + 1);
            out += pad + "}\n";
            return;
        }
    }
}

inline void unparse_stmts(const std::vector<TpStmt>& stmts, std::string& out, int indent) {
    for (const auto& s : stmts) unparse_stmt(s, out, indent);
}

}  // namespace tp_detail

inline std::string unparse_tp(const TpAst& ast) {
    std::string out = "purpose " + ast.name + " {\n";
    tp_detail::unparse_stmts(ast.body, out, 1);
    out += "}\n";
    return out;
}

}  // namespace isoltest::dsl
