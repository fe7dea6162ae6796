#pragma once

#include "isoltest/dsl/lexer.hpp"
#include "isoltest/soc.hpp"

namespace isoltest::dsl {

// SoC parameter DSL:
//
//   soc {
//     sources 8;
//     multitasking false;
//     target nonsecure nonprivileged data1;
//     source secure privileged data2;      // optional, one per line,
//   }                                      // overrides the default list

namespace soc_detail {

inline SecurityLevel security_from(Lexer& lx) {
    Token t = lx.expect_ident();
    if (t.text == "nonsecure") return SecurityLevel::nonsecure;
    if (t.text == "secure") return SecurityLevel::secure;
    lx.fail_at(t.span, "expected nonsecure or secure");
}

inline PrivilegeLevel privilege_from(Lexer& lx) {
    Token t = lx.expect_ident();
    if (t.text == "nonprivileged") return PrivilegeLevel::nonprivileged;
    if (t.text == "privileged") return PrivilegeLevel::privileged;
    lx.fail_at(t.span, "expected nonprivileged or privileged");
}

inline DataValue data_from(Lexer& lx) {
    Token t = lx.expect_ident();
    if (t.text == "data1") return DataValue::data1;
    if (t.text == "data2") return DataValue::data2;
    lx.fail_at(t.span, "expected data1 or data2");
}

inline bool bool_from(Lexer& lx) {
    Token t = lx.expect_ident();
    if (t.text == "false") return false;
    if (t.text == "true") return true;
    lx.fail_at(t.span, "expected true or false");
}

inline const char* text(SecurityLevel s) {
    return s == SecurityLevel::secure ? "secure" : "nonsecure";
}
inline const char* text(PrivilegeLevel p) {
    return p == PrivilegeLevel::privileged ? "privileged" : "nonprivileged";
}
inline const char* text(DataValue d) { return d == DataValue::data2 ? "data2" : "data1"; }

}  // namespace soc_detail

inline SocParams parse_soc_params(const std::string& text, const std::string& file = "<input>") {
    Lexer lx(text, file);
    if (lx.at_eof()) lx.fail("empty input: expected 'soc'");
    lx.expect("soc");
    lx.expect("{");
    SocParams p;
    while (!lx.accept("}")) {
        if (lx.accept("sources")) {
            Token n = lx.next();
            if (n.kind != Token::Kind::number)
                lx.fail_at(n.span, "expected a source count");
            p.n_sources = std::stoi(n.text);
            if (p.n_sources < 1) lx.fail_at(n.span, "source count must be at least 1");
            lx.expect(";");
        } else if (lx.accept("multitasking")) {
            p.multitasking = soc_detail::bool_from(lx);
            lx.expect(";");
        } else if (lx.accept("target")) {
            p.target.security = soc_detail::security_from(lx);
            p.target.privilege = soc_detail::privilege_from(lx);
            p.target.data = soc_detail::data_from(lx);
            lx.expect(";");
        } else if (lx.accept("source")) {
            SourceConfig s;
            s.security = soc_detail::security_from(lx);
            s.privilege = soc_detail::privilege_from(lx);
            s.data = soc_detail::data_from(lx);
            lx.expect(";");
            p.sources.push_back(s);
        } else {
            lx.fail("expected sources / multitasking / target / source");
        }
    }
    if (!lx.at_eof()) lx.fail("trailing input after soc block");
    if (!p.sources.empty() && static_cast<int>(p.sources.size()) != p.n_sources)
        lx.fail("explicit source list does not match the declared source count");
    return p;
}

inline std::string unparse_soc_params(const SocParams& p) {
    using namespace soc_detail;
    std::string out = "soc {\n";
    out += "  sources " + std::to_string(p.n_sources) + ";\n";
    out += std::string("  multitasking ") + (p.multitasking ? "true" : "false") + ";\n";
    out += std::string("  target ") + text(p.target.security) + " " +
           text(p.target.privilege) + " " + text(p.target.data) + ";\n";
    for (const auto& s : p.sources)
        out += std::string("  source ") + text(s.security) + " " + text(s.privilege) + " " +
               text(s.data) + ";\n";
    out += "}\n";
    return out;
}

}  // namespace isoltest::dsl
