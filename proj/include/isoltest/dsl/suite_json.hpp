#pragma once

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "isoltest/aut.hpp"
#include "isoltest/ctg.hpp"
#include "isoltest/dsl/diag.hpp"

namespace isoltest::dsl {

// JSON test-suite format:
//
//   { "model-digest": "...", "scenario-id": "...",
//     "tests": [ { "id": 0, "tree": <node> } ] }
//
// where a node is one of
//   { "type": "stim", "label": "...", "child": <node> }
//   { "type": "obs", "branches": [ { "label": "...", "child": <node> } ] }
//   { "type": "verdict", "verdict": "PASS" | "FAIL" | "INCONCLUSIVE" }

// Stable 64-bit digest (FNV-1a) of the model's canonical AUT rendering,
// used to warn when a suite is replayed against a different model.
inline std::string model_digest(const Lts& model) {
    std::ostringstream os;
    aut_write(model, os);
    const std::string text = os.str();
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct Suite {
    std::string model_digest;
    std::string scenario_id;
    std::vector<TestCase> tests;
};

namespace suite_detail {

inline nlohmann::ordered_json node_to_json(const TestCase& tc, int idx) {
    const TestNode& n = tc.nodes.at(idx);
    nlohmann::ordered_json j;
    switch (n.kind) {
        case TestNode::Kind::stim:
            j["type"] = "stim";
            j["label"] = to_string(n.label);
            j["child"] = node_to_json(tc, n.child);
            break;
        case TestNode::Kind::obs: {
            j["type"] = "obs";
            j["branches"] = nlohmann::ordered_json::array();
            for (const auto& [lab, child] : n.branches)
                j["branches"].push_back(
                    {{"label", to_string(lab)}, {"child", node_to_json(tc, child)}});
            break;
        }
        case TestNode::Kind::verdict:
            j["type"] = "verdict";
            j["verdict"] = to_string(n.verdict);
            break;
    }
    return j;
}

[[noreturn]] inline void schema_error(const std::string& path, const std::string& msg) {
    Diagnostic d;
    d.message = "suite schema violation at " + path + ": " + msg;
    throw ParseError(std::move(d));
}

inline Verdict verdict_from(const std::string& s, const std::string& path) {
    if (s == "PASS") return Verdict::pass;
    if (s == "FAIL") return Verdict::fail;
    if (s == "INCONCLUSIVE") return Verdict::inconclusive;
    schema_error(path, "unknown verdict '" + s + "'");
}

inline int node_from_json(const nlohmann::json& j, TestCase& tc, const std::string& path) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
        schema_error(path, "expected a node object with a \"type\" tag");
    const std::string type = j["type"];
    TestNode n;
    if (type == "stim") {
        if (!j.contains("label") || !j.contains("child"))
            schema_error(path, "stim node needs \"label\" and \"child\"");
        n.kind = TestNode::Kind::stim;
        n.label = parse_label_text(j["label"]);
        n.child = node_from_json(j["child"], tc, path + ".child");
    } else if (type == "obs") {
        if (!j.contains("branches") || !j["branches"].is_array())
            schema_error(path, "obs node needs a \"branches\" array");
        n.kind = TestNode::Kind::obs;
        int i = 0;
        for (const auto& b : j["branches"]) {
            std::string bpath = path + ".branches[" + std::to_string(i++) + "]";
            if (!b.is_object() || !b.contains("label") || !b.contains("child"))
                schema_error(bpath, "branch needs \"label\" and \"child\"");
            n.branches.emplace_back(parse_label_text(b["label"]),
                                    node_from_json(b["child"], tc, bpath + ".child"));
        }
    } else if (type == "verdict") {
        if (!j.contains("verdict") || !j["verdict"].is_string())
            schema_error(path, "verdict node needs a \"verdict\" string");
        n.kind = TestNode::Kind::verdict;
        n.verdict = verdict_from(j["verdict"], path);
    } else {
        schema_error(path, "unknown node type '" + type + "'");
    }
    tc.nodes.push_back(std::move(n));
    return static_cast<int>(tc.nodes.size()) - 1;
}

}  // namespace suite_detail

inline nlohmann::ordered_json suite_to_json(const Suite& s) {
    nlohmann::ordered_json j;
    j["model-digest"] = s.model_digest;
    j["scenario-id"] = s.scenario_id;
    j["tests"] = nlohmann::ordered_json::array();
    for (const auto& tc : s.tests)
        j["tests"].push_back(
            {{"id", tc.id}, {"tree", suite_detail::node_to_json(tc, tc.root)}});
    return j;
}

inline void write_suite(const Suite& s, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << suite_to_json(s).dump(2) << "\n";
}

// Reads a suite; appends a digest-mismatch warning to `warnings` when the
// expected digest is provided and differs.
inline Suite read_suite(const std::string& path,
                        const std::string& expect_digest = "",
                        std::vector<Diagnostic>* warnings = nullptr) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open: " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        suite_detail::schema_error("$", e.what());
    }
    if (!j.is_object() || !j.contains("model-digest") || !j.contains("scenario-id") ||
        !j.contains("tests") || !j["tests"].is_array())
        suite_detail::schema_error("$", "expected model-digest, scenario-id and tests");
    Suite s;
    s.model_digest = j["model-digest"];
    s.scenario_id = j["scenario-id"];
    int i = 0;
    for (const auto& tj : j["tests"]) {
        std::string tpath = "$.tests[" + std::to_string(i++) + "]";
        if (!tj.is_object() || !tj.contains("id") || !tj.contains("tree"))
            suite_detail::schema_error(tpath, "test needs \"id\" and \"tree\"");
        TestCase tc;
        tc.id = tj["id"];
        tc.root = suite_detail::node_from_json(tj["tree"], tc, tpath + ".tree");
        s.tests.push_back(std::move(tc));
    }
    if (!expect_digest.empty() && s.model_digest != expect_digest && warnings)
        warnings->push_back(Diagnostic{
            Severity::warning,
            "suite was generated for a different model (digest " + s.model_digest +
                ", current " + expect_digest + ")",
            SourceSpan{path, 1, 1, 1, 1}});
    return s;
}

}  // namespace isoltest::dsl
