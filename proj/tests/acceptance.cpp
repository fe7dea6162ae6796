// Acceptance gate: one line per release criterion, nonzero exit when a hard
// criterion fails. Count metrics are reported against their reference values
// and marked as documented deviations (docs/reproduction.md) when they differ.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "isoltest/catalog.hpp"
#include "isoltest/ctg.hpp"
#include "isoltest/determinize.hpp"
#include "isoltest/dsl/suite_json.hpp"
#include "isoltest/equivalence.hpp"
#include "isoltest/infer.hpp"
#include "isoltest/minimize.hpp"
#include "isoltest/soc.hpp"
#include "bisim_oracle.hpp"
#include "infer_oracle.hpp"
#include "util.hpp"

using namespace isoltest;

namespace {

int failures = 0;

void line(const std::string& name, bool ok, const std::string& detail = "") {
    std::printf("%-58s %s%s%s\n", name.c_str(), ok ? "pass" : "FAIL",
                detail.empty() ? "" : "  ", detail.c_str());
    if (!ok) ++failures;
}

void soft_line(const std::string& name, const std::string& reference,
               const std::string& computed) {
    bool match = reference == computed;
    std::printf("%-58s pass  %s (reference %s%s)\n", name.c_str(), computed.c_str(),
                reference.c_str(),
                match ? "" : "; deviation documented in docs/reproduction.md");
}

template <class F>
void criterion(const std::string& name, F f) {
    try {
        f();
    } catch (const std::exception& e) {
        line(name, false, std::string("exception: ") + e.what());
    }
}

std::string triple(const Lts& l) {
    return std::to_string(l.num_states()) + "/" + std::to_string(l.num_transitions()) + "/" +
           std::to_string(l.num_visible_labels());
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Lts& reference_model() {
    static Lts model = [] {
        SocParams p;
        p.n_sources = 8;
        return minimize(build_soc_lts(p), Relation::strong);
    }();
    return model;
}

}  // namespace

int main() {
    SocParams p8;
    p8.n_sources = 8;

    // --- equivalence battery ----------------------------------------------
    criterion("equivalence: multi-source ~ multitasking", [&] {
        SocParams p1;
        p1.n_sources = 1;
        p1.multitasking = true;
        Lts a = relabel_for_comparison(build_soc_lts(p8));
        Lts b = relabel_for_comparison(build_soc_lts(p1));
        line("equivalence: multi-source ~ multitasking",
             equivalent(a, b, Relation::branching).equivalent);
    });

    criterion("equivalence: constraint model ~ behavioral model", [&] {
        Lts mono = build_constraint_lts(monolithic_ri_model());
        Lts lhs = determinize(relabel_to_soc_vocabulary(mono));
        Lts rhs = relabel_for_comparison(build_soc_lts(p8));
        line("equivalence: constraint model ~ behavioral model",
             equivalent(lhs, rhs, Relation::branching).equivalent);
    });

    criterion("equivalence: partition vs fixed-point oracle", [&] {
        bool ok = true;
        for (uint64_t seed = 0; seed < 100 && ok; ++seed) {
            Lts l = testutil::random_lts(seed);
            auto sblock = bisimulation_partition(l, Relation::strong);
            auto srel = testutil::strong_oracle(l);
            auto bblock = bisimulation_partition(l, Relation::branching);
            auto brel = testutil::branching_oracle(l);
            for (int p = 0; p < l.num_states() && ok; ++p)
                for (int q = 0; q < l.num_states(); ++q)
                    if ((sblock[p] == sblock[q]) != srel[p][q] ||
                        (bblock[p] == bblock[q]) != brel[p][q]) {
                        ok = false;
                        break;
                    }
        }
        line("equivalence: partition vs fixed-point oracle", ok, "100 random models");
    });

    // --- model and CTG metrics --------------------------------------------
    criterion("model metrics", [&] {
        soft_line("model size: 8-source minimized", "182/558/99", triple(reference_model()));
        Lts hidden = minimize(relabel_for_comparison(reference_model()), Relation::branching);
        soft_line("model size: hidden+minimized", "52/268/39", triple(hidden));
        Lts mono = build_constraint_lts(monolithic_ri_model());
        soft_line("model size: monolithic constraint LTS", "2736/4591/4592", triple(mono));
    });

    std::map<std::string, Ctg> ctgs;
    std::map<std::string, std::vector<TestCase>> suites;
    criterion("ctg extraction", [&] {
        for (const auto& id : scenario_ids()) {
            ctgs.emplace(id, extract_ctg(product(reference_model(), scenario_tp(id)),
                                         soc_controllable_gate));
            suites.emplace(id, extract_test_suite(ctgs.at(id)));
        }
        soft_line("ctg size: scenario 1", "183/567",
                  std::to_string(ctgs.at("1").lts.num_states()) + "/" +
                      std::to_string(ctgs.at("1").lts.num_transitions()));
        soft_line("ctg size: scenario 2", "2649/12057",
                  std::to_string(ctgs.at("2").lts.num_states()) + "/" +
                      std::to_string(ctgs.at("2").lts.num_transitions()));
        soft_line("ctg size: scenario 3", "967/3271",
                  std::to_string(ctgs.at("3").lts.num_states()) + "/" +
                      std::to_string(ctgs.at("3").lts.num_transitions()));
        soft_line("ctg choices: scenario 1", "384", std::to_string(choices(ctgs.at("1"))));
        soft_line("ctg choices: scenario 2", "8832", std::to_string(choices(ctgs.at("2"))));
        soft_line("ctg choices: scenario 3", "2208", std::to_string(choices(ctgs.at("3"))));
        soft_line("suite size: scenario 1", "357", std::to_string(suites.at("1").size()));
        soft_line("suite size: scenario 2", "8328", std::to_string(suites.at("2").size()));
        soft_line("suite size: scenario 3", "2072", std::to_string(suites.at("3").size()));

        bool order =
            ctgs.at("1").lts.num_states() < ctgs.at("3").lts.num_states() &&
            ctgs.at("3").lts.num_states() < ctgs.at("2").lts.num_states() &&
            ctgs.at("1").lts.num_transitions() < ctgs.at("3").lts.num_transitions() &&
            ctgs.at("3").lts.num_transitions() < ctgs.at("2").lts.num_transitions();
        line("ctg size ordering: scenario 1 < 3 < 2", order);
    });

    // --- suite soundness and mutation detection ----------------------------
    criterion("suite soundness", [&] {
        auto t0 = std::chrono::steady_clock::now();
        Executor ex(reference_model(), soc_controllable_gate);
        bool sound = true;
        for (const auto& [id, suite] : suites)
            for (const auto& tc : suite)
                for (uint64_t seed = 0; seed < 50 && sound; ++seed)
                    if (ex.run(tc, seed) == Verdict::fail) sound = false;
        auto secs = std::chrono::duration_cast<std::chrono::seconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
        line("suite soundness: all scenarios, 50 seeds, 0 FAIL",
             sound && secs < 300, std::to_string(secs) + " s");
    });

    criterion("mutation detection", [&] {
        bool all_caught = true;
        std::string missed;
        for (const auto& id : mutation_catalog()) {
            Lts mut = build_soc_lts(p8, mutation_from_string(id));
            Executor mex(mut, soc_controllable_gate);
            bool caught = false;
            for (const auto* sid : {"1", "2"}) {
                for (const auto& tc : suites.at(sid)) {
                    for (uint64_t seed = 0; seed < 5 && !caught; ++seed)
                        if (mex.run(tc, seed) == Verdict::fail) caught = true;
                    if (caught) break;
                }
                if (caught) break;
            }
            if (!caught) {
                all_caught = false;
                missed += (missed.empty() ? "" : ", ") + id;
            }
        }
        line("mutation detection: every seeded fault caught", all_caught,
             all_caught ? "4/4" : "missed: " + missed);
    });

    // --- inference ---------------------------------------------------------
    ConstraintModel cm = monolithic_ri_model();
    criterion("inference minimality", [&] {
        bool ok = true;
        for (const auto* id : {"1", "2", "3", "4"}) {
            VerificationIntent vi = scenario_vi(id, cm);
            InferredTest t = backward_infer(cm, vi);
            if (!replays(cm, t) || t.length() != testutil::oracle_shortest(cm, vi)) ok = false;
        }
        line("inference minimality: backward search matches oracle", ok, "scenarios 1-4");
    });

    criterion("inference shape", [&] {
        InferredTest t1 = backward_infer(cm, scenario_vi("1", cm));
        int configs = 0;
        for (const auto& s : t1.steps)
            if (s.action == "config_change") ++configs;
        bool s1 = t1.length() == 4 && configs == 1 &&
                  t1.steps.back().action.rfind("reject_", 0) == 0;

        InferredTest t2 = backward_infer(cm, scenario_vi("2", cm));
        bool s2 = true;
        bool seen_reject = false;
        for (const auto& s : t2.steps) {
            if (s.action.rfind("reject_", 0) == 0) seen_reject = true;
            if (s.action.rfind("grant_", 0) == 0 && seen_reject) s2 = false;
        }
        line("inference shape: scenarios 1 and 2", s1 && s2);
    });

    criterion("write/read isolation scenario", [&] {
        TpProduct prod = product(reference_model(), scenario_tp("4"));
        const Ctg& c4 = ctgs.at("4");
        bool exclusion = true;
        for (const auto& t : c4.lts.transitions())
            if (c4.lts.label(t.label).gate == soc_gates::kGrantProtection &&
                c4.tp_state[t.from] != 0)
                exclusion = false;

        bool dominance = true;
        int advancing_reads = 0;
        for (const auto& t : prod.lts.transitions()) {
            const Label& lab = prod.lts.label(t.label);
            if (lab.gate != soc_gates::kRead) continue;
            if (prod.tp_state[t.from] == prod.tp_state[t.to]) continue;
            const CaptureEnv& env = prod.env[t.from];
            if (!env.count("ws") || !env.count("wp")) {
                dominance = false;
                break;
            }
            int rs = lab.offers.at(1).ord, rp = lab.offers.at(2).ord;
            int ws = env.at("ws").ord, wp = env.at("wp").ord;
            if (rs < ws || rp < wp || (rs == ws && rp == wp)) dominance = false;
            ++advancing_reads;
        }
        line("write/read isolation: no protection change, levels rise",
             exclusion && dominance && advancing_reads > 0);
    });

    // --- formats ------------------------------------------------------------
    criterion("dsl round trips", [&] {
        bool ok = true;
        for (const auto& id : scenario_ids()) {
            std::string text = scenario_tp_text(id);
            if (dsl::unparse_tp(dsl::parse_tp_ast(text)) != text) ok = false;
        }
        for (const auto* id : {"1", "2", "3", "4"}) {
            std::string text = scenario_vi_text(id);
            if (dsl::unparse_vi(dsl::parse_vi(text, cm), cm) != text) ok = false;
        }
        if (dsl::unparse_pss_model(dsl::parse_pss_model(catalog_model_text())) !=
            catalog_model_text())
            ok = false;
        if (dsl::unparse_soc_params(dsl::parse_soc_params(catalog_soc_text())) !=
            catalog_soc_text())
            ok = false;
        line("dsl round trips: purposes, intents, model, parameters", ok);
    });

    criterion("golden catalog", [&] {
        const std::string dir = std::string(ISOLTEST_DATA_DIR) + "/catalog/";
        bool ok = true;
        for (const auto& id : scenario_ids())
            if (slurp(dir + "scenario-" + id + ".tp") != scenario_tp_text(id)) ok = false;
        for (const auto* id : {"1", "2", "3", "4"})
            if (slurp(dir + "scenario-" + std::string(id) + ".vi") != scenario_vi_text(id))
                ok = false;
        if (slurp(dir + "model.pss") != catalog_model_text()) ok = false;
        if (slurp(dir + "soc.params") != catalog_soc_text()) ok = false;
        line("golden catalog: files parse and match the built-ins", ok);
    });

    criterion("aut round trip", [&] {
        bool ok = true;
        for (uint64_t seed = 0; seed < 10; ++seed) {
            Lts l = testutil::random_lts(seed);
            if (!testutil::identical(testutil::aut_round_trip(l), l)) ok = false;
        }
        if (!testutil::identical(testutil::aut_round_trip(reference_model()),
                                 reference_model()))
            ok = false;
        line("aut round trip: exact identity", ok);
    });

    if (failures) std::printf("\n%d criterion(s) failed\n", failures);
    return failures ? 1 : 0;
}
