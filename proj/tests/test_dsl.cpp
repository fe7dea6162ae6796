#include <fstream>
#include <functional>
#include <sstream>

#include <catch_amalgamated.hpp>

#include "isoltest/catalog.hpp"
#include "isoltest/ctg.hpp"
#include "isoltest/dsl/suite_json.hpp"
#include "isoltest/equivalence.hpp"
#include "isoltest/minimize.hpp"

using namespace isoltest;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    REQUIRE(f.good());
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

const std::string kDataDir = ISOLTEST_DATA_DIR;

std::string diag_of(const std::function<void()>& parse) {
    try {
        parse();
    } catch (const dsl::ParseError& e) {
        return e.diagnostic.message;
    }
    return "";
}

}  // namespace

TEST_CASE("test-purpose texts round-trip through parse and unparse") {
    for (const auto& id : scenario_ids()) {
        std::string text = scenario_tp_text(id);
        dsl::TpAst ast = dsl::parse_tp_ast(text);
        std::string again = dsl::unparse_tp(ast);
        CHECK(again == dsl::unparse_tp(dsl::parse_tp_ast(again)));
        // The stored catalog texts are already canonical.
        CHECK(again == text);
    }
}

TEST_CASE("test-purpose parser diagnostics") {
    CHECK(diag_of([] { dsl::parse_tp(""); }) == "empty input: expected 'purpose'");
    CHECK_FALSE(diag_of([] { dsl::parse_tp("purpose p { match A() }"); }).empty());  // no accept
    CHECK(diag_of([] {
              dsl::parse_tp("purpose p { select { accept } or { match A() } accept }");
          }).find("only allowed at the end") != std::string::npos);
    CHECK(diag_of([] {
              dsl::parse_tp("purpose p { match A(?x) where y > x accept }");
          }).find("unbound capture variable 'y'") != std::string::npos);
    CHECK(diag_of([] {
              dsl::parse_tp("purpose p { select { match A() } accept }");
          }).find("at least two") != std::string::npos);
    // Spans point at the offending token.
    try {
        dsl::parse_tp("purpose p {\n  match A(?x) where y > x\n  accept\n}", "f.tp");
        FAIL("expected a diagnostic");
    } catch (const dsl::ParseError& e) {
        CHECK(e.diagnostic.span.file == "f.tp");
        CHECK(e.diagnostic.span.line == 2);
    }
}

TEST_CASE("compiled purposes drive the product as written") {
    // A select over two matches accepts after either response.
    TestPurpose tp = dsl::parse_tp(
        "purpose p { select { match O1() } or { match O2() } accept }");
    CHECK(tp.accept.size() >= 1);
    Lts model(3, 0);
    model.add_transition(0, Label{"O1", {}}, 1);
    model.add_transition(0, Label{"O2", {}}, 2);
    TpProduct prod = product(model, tp);
    int accepting = 0;
    for (int s = 0; s < prod.lts.num_states(); ++s)
        if (prod.accept[s]) ++accepting;
    CHECK(accepting == 2);
}

TEST_CASE("constraint-model text round-trips and rebuilds the builtin model") {
    std::string text = catalog_model_text();
    ConstraintModel parsed = dsl::parse_pss_model(text);
    CHECK(dsl::unparse_pss_model(parsed) == text);
    CHECK(parsed.actions.size() == monolithic_ri_model().actions.size());
    Lts a = build_constraint_lts(parsed);
    Lts b = build_constraint_lts(monolithic_ri_model());
    CHECK(equivalent(a, b, Relation::strong).equivalent);
}

TEST_CASE("constraint-model parser diagnostics") {
    const std::string header =
        "component c {\n"
        "  enum security { nonsecure, secure }\n"
        "  enum data { data1, data2 }\n"
        "  flow object st { security s; data d; }\n";
    CHECK(diag_of([&] {
              dsl::parse_pss_model(header +
                                   "  action a { init; output st out;\n"
                                   "    constraint out.s == data1; } }");
          }).find("'data1' is not a value of domain 'security'") != std::string::npos);
    CHECK(diag_of([&] {
              dsl::parse_pss_model(header +
                                   "  action a { init; output st out;\n"
                                   "    constraint out.s == out.d; } }");
          }).find("domain mismatch") != std::string::npos);
    CHECK(diag_of([&] {
              dsl::parse_pss_model(header + "  action a { init; }\n  action b { init; } }");
          }).find("multiple init actions") != std::string::npos);
    CHECK(diag_of([&] {
              dsl::parse_pss_model(header + "  action a { init; constraint out.zz == secure; } }");
          }).find("unknown flow field 'zz'") != std::string::npos);
    CHECK(diag_of([&] { dsl::parse_pss_model(header + "}"); })
              .find("no init action") != std::string::npos);
}

TEST_CASE("verification-intent texts round-trip against the model") {
    ConstraintModel m = monolithic_ri_model();
    for (const auto* id : {"1", "2", "3", "4"}) {
        VerificationIntent vi = scenario_vi(id, m);
        CHECK(dsl::unparse_vi(vi, m) == scenario_vi_text(id));
    }
}

TEST_CASE("verification-intent parser diagnostics") {
    ConstraintModel m = monolithic_ri_model();
    CHECK(diag_of([&] {
              dsl::parse_vi("intent i { activity { nope; } }", m);
          }).find("unknown handle 'nope'") != std::string::npos);
    CHECK(diag_of([&] {
              dsl::parse_vi("intent i { handle h : frobnicate; activity { h; } }", m);
          }).find("unknown action 'frobnicate'") != std::string::npos);
    CHECK(diag_of([&] {
              dsl::parse_vi(
                  "intent i { handle a : grant_read; handle b : grant_write;"
                  " activity { a; b; } bind a -> b; bind b -> a; }",
                  m);
          }).find("bind cycle") != std::string::npos);
    CHECK(diag_of([&] {
              dsl::parse_vi("intent i { handle a : grant_read; }", m);
          }).find("no activity") != std::string::npos);
}

TEST_CASE("soc parameter text round-trips") {
    std::string text = catalog_soc_text();
    SocParams p = dsl::parse_soc_params(text);
    CHECK(p.n_sources == 8);
    CHECK_FALSE(p.multitasking);
    CHECK(dsl::unparse_soc_params(p) == text);

    SocParams q = dsl::parse_soc_params(
        "soc { sources 1; multitasking true; target secure privileged data2;"
        " source nonsecure nonprivileged data1; }");
    CHECK(q.multitasking);
    CHECK(q.target.security == SecurityLevel::secure);
    REQUIRE(q.sources.size() == 1);
    CHECK(q.sources[0].security == SecurityLevel::nonsecure);

    CHECK(diag_of([] { dsl::parse_soc_params("soc { sources 0; }"); })
              .find("at least 1") != std::string::npos);
    CHECK(diag_of([] {
              dsl::parse_soc_params("soc { sources 2; source secure privileged data1; }");
          }).find("does not match") != std::string::npos);
}

TEST_CASE("golden catalog files parse cleanly and match the embedded texts") {
    for (const auto& id : scenario_ids())
        CHECK(slurp(kDataDir + "/catalog/scenario-" + id + ".tp") == scenario_tp_text(id));
    ConstraintModel m = monolithic_ri_model();
    for (const auto* id : {"1", "2", "3", "4"}) {
        std::string text = slurp(kDataDir + "/catalog/scenario-" + std::string(id) + ".vi");
        CHECK(text == scenario_vi_text(id));
        CHECK(dsl::unparse_vi(dsl::parse_vi(text, m), m) == text);
    }
    CHECK(slurp(kDataDir + "/catalog/model.pss") == catalog_model_text());
    CHECK(slurp(kDataDir + "/catalog/soc.params") == catalog_soc_text());
}

TEST_CASE("suite json round-trips byte for byte") {
    // A two-source model with one strong and one weak source is the smallest
    // that exhibits both grants and rejects.
    SocParams p;
    p.n_sources = 2;
    p.sources = {SourceConfig{SecurityLevel::secure, PrivilegeLevel::privileged,
                              DataValue::data1},
                 SourceConfig{SecurityLevel::nonsecure, PrivilegeLevel::nonprivileged,
                              DataValue::data2}};
    Lts model = minimize(build_soc_lts(p), Relation::strong);
    Ctg ctg = extract_ctg(product(model, scenario_tp("3")), soc_controllable_gate);
    dsl::Suite s;
    s.model_digest = dsl::model_digest(model);
    s.scenario_id = "3";
    s.tests = extract_test_suite(ctg);
    REQUIRE_FALSE(s.tests.empty());

    const std::string path = "suite_roundtrip.json";
    dsl::write_suite(s, path);
    dsl::Suite r = dsl::read_suite(path, s.model_digest);
    CHECK(r.scenario_id == s.scenario_id);
    REQUIRE(r.tests.size() == s.tests.size());
    const std::string path2 = "suite_roundtrip2.json";
    dsl::write_suite(r, path2);
    CHECK(slurp(path) == slurp(path2));
    CHECK(execute_suite(r.tests, model, soc_controllable_gate, 5) != Verdict::fail);
    std::remove(path.c_str());
    std::remove(path2.c_str());
}

TEST_CASE("an empty suite is a valid file") {
    dsl::Suite s;
    s.model_digest = "0";
    s.scenario_id = "none";
    const std::string path = "suite_empty.json";
    dsl::write_suite(s, path);
    dsl::Suite r = dsl::read_suite(path);
    CHECK(r.tests.empty());
    std::remove(path.c_str());
}

TEST_CASE("digest mismatches surface as warnings") {
    dsl::Suite s;
    s.model_digest = "aaaa";
    s.scenario_id = "1";
    const std::string path = "suite_digest.json";
    dsl::write_suite(s, path);
    std::vector<dsl::Diagnostic> warnings;
    dsl::read_suite(path, "bbbb", &warnings);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].severity == dsl::Severity::warning);
    CHECK(warnings[0].message.find("different model") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("suite schema violations carry json paths") {
    auto write_and_read = [](const std::string& body) {
        const std::string path = "suite_bad.json";
        {
            std::ofstream f(path);
            f << body;
        }
        std::string msg = diag_of([&] { dsl::read_suite(path); });
        std::remove(path.c_str());
        return msg;
    };
    CHECK(write_and_read("{}").find("$") != std::string::npos);
    CHECK(write_and_read("not json at all").find("schema violation") != std::string::npos);
    CHECK(write_and_read(
              R"({"model-digest":"x","scenario-id":"1","tests":[{"id":0,"tree":{"type":"bogus"}}]})")
              .find("$.tests[0].tree") != std::string::npos);
    CHECK(write_and_read(
              R"({"model-digest":"x","scenario-id":"1","tests":[{"id":0,"tree":{"type":"verdict","verdict":"MAYBE"}}]})")
              .find("unknown verdict") != std::string::npos);
}
