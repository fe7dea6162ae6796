// Command-line front end: build and compare the behavioral models, generate
// complete test graphs and suites from the scenario catalog, run backward
// action inference on the constraint model, execute suites against (possibly
// mutated) models, and print the full reproduction table.

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "isoltest/catalog.hpp"
#include "isoltest/ctg.hpp"
#include "isoltest/determinize.hpp"
#include "isoltest/dsl/suite_json.hpp"
#include "isoltest/equivalence.hpp"
#include "isoltest/minimize.hpp"

using namespace isoltest;

namespace {

constexpr int kExitSemantic = 1;
constexpr int kExitUsage = 2;

std::string read_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open: " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

struct ModelFlags {
    int sources = 8;
    bool multitasking = false;
    std::string params_file;
    std::string mutation;

    SocParams params() const {
        SocParams p;
        if (!params_file.empty()) {
            p = dsl::parse_soc_params(read_file(params_file), params_file);
        } else {
            p.n_sources = sources;
            p.multitasking = multitasking;
        }
        return p;
    }

    Lts build(long limit) const {
        SocParams p = params();
        Mutation m = mutation.empty() ? Mutation::none : mutation_from_string(mutation);
        return build_soc_lts(p, m, limit);
    }
};

void add_model_flags(CLI::App* cmd, ModelFlags& mf) {
    cmd->add_option("--sources", mf.sources, "number of sources")->check(CLI::PositiveNumber);
    cmd->add_flag("--multitasking", mf.multitasking, "sources change their own configuration");
    cmd->add_option("--params", mf.params_file, "SoC parameter file (overrides --sources)");
    cmd->add_option("--mutation", mf.mutation, "inject a fault from the mutation catalog");
}

void print_counts(const std::string& what, const Lts& l) {
    std::cout << what << ": " << l.num_states() << " states, " << l.num_transitions()
              << " transitions, " << l.num_visible_labels() << " labels\n";
}

Lts scenario_model(const ModelFlags& mf, long limit) {
    return minimize(mf.build(limit), Relation::strong);
}

TestPurpose load_tp(const std::string& scenario, const std::string& tp_file) {
    if (!tp_file.empty()) return dsl::parse_tp(read_file(tp_file), tp_file);
    return scenario_tp(scenario);
}

// --- repro report ---------------------------------------------------------

struct ReproRow {
    std::string metric;
    std::string reference;
    std::string computed;
    bool hard = false;
    bool match = false;
    std::string note;
};

void print_report(const std::vector<ReproRow>& rows) {
    size_t wm = 6, wp = 9, wc = 8;
    for (const auto& r : rows) {
        wm = std::max(wm, r.metric.size());
        wp = std::max(wp, r.reference.size());
        wc = std::max(wc, r.computed.size());
    }
    std::cout << std::left << std::setw(static_cast<int>(wm)) << "metric" << "  "
              << std::setw(static_cast<int>(wp)) << "reference" << "  "
              << std::setw(static_cast<int>(wc)) << "computed" << "  kind  ok  note\n";
    for (const auto& r : rows)
        std::cout << std::left << std::setw(static_cast<int>(wm)) << r.metric << "  "
                  << std::setw(static_cast<int>(wp)) << r.reference << "  "
                  << std::setw(static_cast<int>(wc)) << r.computed << "  "
                  << (r.hard ? "hard" : "soft") << "  " << (r.match ? "yes " : "NO  ")
                  << r.note << "\n";
}

std::string triple(const Lts& l) {
    return std::to_string(l.num_states()) + "/" + std::to_string(l.num_transitions()) + "/" +
           std::to_string(l.num_visible_labels());
}

int cmd_repro(long limit) {
    std::vector<ReproRow> rows;
    auto row = [&](std::string metric, std::string reference, std::string computed, bool hard,
                   bool match, std::string note = "") {
        rows.push_back(ReproRow{std::move(metric), std::move(reference), std::move(computed), hard,
                                match, std::move(note)});
    };
    const std::string kDeviation = "documented deviation (docs/reproduction.md)";

    SocParams p8;
    p8.n_sources = 8;
    Lts min8 = minimize(build_soc_lts(p8, Mutation::none, limit), Relation::strong);
    row("8-source minimized", "182/558/99", triple(min8), false,
        triple(min8) == "182/558/99",
        triple(min8) == "182/558/98" ? kDeviation + ": label layout" : "");

    Lts cmp8 = relabel_for_comparison(min8);
    Lts hidden = minimize(cmp8, Relation::branching);
    row("hidden+minimized", "52/268/39", triple(hidden), false, triple(hidden) == "52/268/39",
        triple(hidden) == "52/268/38" ? kDeviation + ": label layout" : "");

    ConstraintModel cm = monolithic_ri_model();
    Lts mono = build_constraint_lts(cm, limit);
    row("monolithic constraint LTS", "2736/4591/4592", triple(mono), false,
        triple(mono) == "2736/4591/4592", kDeviation + ": valuation-level state space");

    // hard: equivalence battery
    SocParams p1;
    p1.n_sources = 1;
    p1.multitasking = true;
    Lts cmp1 = relabel_for_comparison(build_soc_lts(p1, Mutation::none, limit));
    bool eq_a = static_cast<bool>(equivalent(cmp8, cmp1, Relation::branching));
    row("8-source ~ 1-source-multitasking (branching)", "equivalent",
        eq_a ? "equivalent" : "inequivalent", true, eq_a);

    Lts mono_cmp = determinize(relabel_to_soc_vocabulary(mono), limit);
    bool eq_b = static_cast<bool>(equivalent(mono_cmp, cmp8, Relation::branching));
    row("constraint model ~ behavioral model (branching)", "equivalent",
        eq_b ? "equivalent" : "inequivalent", true, eq_b);

    bool mutants_differ = true;
    for (const auto& id : mutation_catalog()) {
        Lts mut = relabel_for_comparison(build_soc_lts(p8, mutation_from_string(id), limit));
        if (equivalent(cmp8, mut, Relation::branching)) mutants_differ = false;
    }
    row("mutants inequivalent to reference", "4/4", mutants_differ ? "4/4" : "miss", true,
        mutants_differ);

    // scenario CTGs
    struct RefCtg {
        const char* id;
        const char* counts;
        const char* choices;
        const char* tests;
    };
    const RefCtg refs[] = {{"1", "183/567/101", "384", "357"},
                              {"2", "2649/12057", "8832", "8328"},
                              {"3", "967/3271", "2208", "2072"}};
    std::map<std::string, Ctg> ctgs;
    std::map<std::string, size_t> suite_sizes;
    for (const auto& id : scenario_ids())
        ctgs.emplace(id, extract_ctg(product(min8, scenario_tp(id)), soc_controllable_gate));
    for (const auto& pc : refs) {
        const Ctg& c = ctgs.at(pc.id);
        std::string counts = std::to_string(c.lts.num_states()) + "/" +
                             std::to_string(c.lts.num_transitions());
        if (std::string(pc.id) == "1") counts += "/" + std::to_string(c.lts.num_visible_labels());
        row(std::string("scenario-") + pc.id + " CTG", pc.counts, counts, false,
            counts == pc.counts, kDeviation + ": CTG construction");
        std::string ch = std::to_string(choices(c));
        row(std::string("scenario-") + pc.id + " choices", pc.choices, ch, false,
            ch == pc.choices,
            ch == pc.choices ? "" : kDeviation + " (decision states: " +
                                        std::to_string(decision_states(c)) + ")");
        size_t n = extract_test_suite(c).size();
        suite_sizes[pc.id] = n;
        row(std::string("scenario-") + pc.id + " suite", pc.tests, std::to_string(n), false,
            std::to_string(n) == pc.tests, kDeviation + ": greedy covering");
    }

    bool order_states = ctgs.at("1").lts.num_states() < ctgs.at("3").lts.num_states() &&
                        ctgs.at("3").lts.num_states() < ctgs.at("2").lts.num_states();
    bool order_trans =
        ctgs.at("1").lts.num_transitions() < ctgs.at("3").lts.num_transitions() &&
        ctgs.at("3").lts.num_transitions() < ctgs.at("2").lts.num_transitions();
    row("CTG ordering 1 < 3 < 2", "holds", order_states && order_trans ? "holds" : "violated",
        true, order_states && order_trans);

    // hard: scenario-4 exclusion
    const Ctg& c4 = ctgs.at("4");
    bool exclusion = true;
    for (const auto& t : c4.lts.transitions())
        if (c4.lts.label(t.label).gate == soc_gates::kGrantProtection &&
            c4.tp_state[t.from] != 0)
            exclusion = false;
    row("scenario-4 protection-change exclusion", "holds", exclusion ? "holds" : "violated",
        true, exclusion);

    // hard: soundness + mutation detection
    {
        auto t0 = std::chrono::steady_clock::now();
        Executor ex(min8, soc_controllable_gate);
        bool sound = true;
        std::map<std::string, std::vector<TestCase>> suites;
        for (const auto& pc : refs) suites[pc.id] = extract_test_suite(ctgs.at(pc.id));
        suites["4"] = extract_test_suite(ctgs.at("4"));
        for (const auto& [id, suite] : suites)
            for (const auto& tc : suite)
                for (uint64_t s = 0; s < 50; ++s)
                    if (ex.run(tc, s) == Verdict::fail) sound = false;
        auto secs = std::chrono::duration_cast<std::chrono::seconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
        row("soundness (50 seeds, scenarios 1-4)", "0 FAIL, < 5 min",
            std::string(sound ? "0 FAIL" : "FAIL seen") + ", " + std::to_string(secs) + " s",
            true, sound && secs < 300);

        bool detection = true;
        for (const auto& id : mutation_catalog()) {
            Lts mut = build_soc_lts(p8, mutation_from_string(id), limit);
            Executor mex(mut, soc_controllable_gate);
            bool caught = false;
            for (const auto* sid : {"1", "2"})
                for (const auto& tc : suites[sid]) {
                    for (uint64_t s = 0; s < 5 && !caught; ++s)
                        if (mex.run(tc, s) == Verdict::fail) caught = true;
                    if (caught) break;
                }
            if (!caught) detection = false;
        }
        row("mutation detection (scenario 1+2 suites)", "4/4", detection ? "4/4" : "miss", true,
            detection);
    }

    // hard: inference shape checks (full minimality oracle lives in the tests)
    {
        InferredTest t1 = backward_infer(cm, scenario_vi("1", cm));
        bool s1 = t1.length() == 4 && t1.steps.back().action == "reject_protection";
        int configs = 0;
        for (const auto& s : t1.steps)
            if (s.action == "config_change") ++configs;
        s1 = s1 && configs == 1;
        row("scenario-1 inferred test", "4 steps, 1 config change, ends reject_protection",
            std::to_string(t1.length()) + " steps, " + std::to_string(configs) +
                " config change, ends " + t1.steps.back().action,
            true, s1);

        InferredTest t2 = backward_infer(cm, scenario_vi("2", cm));
        bool grants_first = true;
        bool seen_reject = false;
        for (const auto& s : t2.steps) {
            if (s.action.rfind("reject_", 0) == 0) seen_reject = true;
            if (s.action.rfind("grant_", 0) == 0 && seen_reject) grants_first = false;
        }
        row("scenario-2 inferred order", "all grants before all rejects",
            grants_first ? "all grants before all rejects" : "interleaved", true, grants_first);
    }

    print_report(rows);
    bool hard_ok = true;
    for (const auto& r : rows)
        if (r.hard && !r.match) hard_ok = false;
    bool soft_ok = true;
    for (const auto& r : rows)
        if (!r.hard && !r.match && r.note.empty()) soft_ok = false;
    if (!hard_ok) std::cout << "\nhard criterion failed\n";
    if (!soft_ok) std::cout << "\nsoft metric mismatch without a deviation note\n";
    return hard_ok && soft_ok ? 0 : kExitSemantic;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"resource-isolation test generation toolkit"};
    app.require_subcommand(1);
    long limit = state_limit_from_env();

    // build-lts
    ModelFlags build_mf;
    std::string build_out, build_minimize = "none";
    auto* build = app.add_subcommand("build-lts", "build a behavioral SoC model");
    add_model_flags(build, build_mf);
    build->add_option("--minimize", build_minimize, "none | strong | branching | weak-trace");
    build->add_option("--out", build_out, "AUT output file");

    // compare
    std::string cmp_a, cmp_b, cmp_rel = "branching";
    bool cmp_drop_ids = false;
    std::vector<std::string> cmp_hide;
    auto* cmp = app.add_subcommand("compare", "check equivalence of two AUT files");
    cmp->add_option("a", cmp_a, "first AUT file")->required();
    cmp->add_option("b", cmp_b, "second AUT file")->required();
    cmp->add_option("--relation", cmp_rel, "strong | branching | weak-trace");
    cmp->add_flag("--drop-ids", cmp_drop_ids, "strip the source identity offer from labels");
    cmp->add_option("--hide", cmp_hide, "gates to hide (repeatable)");

    // gen-ctg
    ModelFlags ctg_mf;
    std::string ctg_scenario, ctg_tp, ctg_out;
    auto* gen_ctg = app.add_subcommand("gen-ctg", "extract a complete test graph");
    add_model_flags(gen_ctg, ctg_mf);
    auto* ctg_s = gen_ctg->add_option("--scenario", ctg_scenario, "catalog scenario id");
    gen_ctg->add_option("--tp", ctg_tp, "test purpose file")->excludes(ctg_s);
    gen_ctg->add_option("--out", ctg_out, "AUT output (plus .notes.json sidecar)");

    // gen-suite
    ModelFlags suite_mf;
    std::string suite_scenario, suite_tp, suite_out, suite_coverage = "all-choices";
    auto* gen_suite = app.add_subcommand("gen-suite", "extract a covering test suite");
    add_model_flags(gen_suite, suite_mf);
    auto* suite_s = gen_suite->add_option("--scenario", suite_scenario, "catalog scenario id");
    gen_suite->add_option("--tp", suite_tp, "test purpose file")->excludes(suite_s);
    gen_suite->add_option("--coverage", suite_coverage, "coverage criterion (all-choices)");
    gen_suite->add_option("--out", suite_out, "JSON suite output file");

    // infer
    std::string infer_scenario, infer_vi, infer_model;
    bool infer_sample = false;
    uint64_t infer_seed = 0;
    auto* infer = app.add_subcommand("infer", "backward action inference from an intent");
    auto* infer_s = infer->add_option("--scenario", infer_scenario, "catalog scenario id");
    infer->add_option("--vi", infer_vi, "verification intent file")->excludes(infer_s);
    infer->add_option("--model", infer_model, "constraint model file (default: builtin)");
    infer->add_flag("--sample", infer_sample, "sample among equally short tests");
    infer->add_option("--seed", infer_seed, "sampling seed");

    // run-suite
    ModelFlags run_mf;
    std::string run_suite_file;
    uint64_t run_seed = 0;
    auto* run = app.add_subcommand("run-suite", "execute a suite against a model");
    add_model_flags(run, run_mf);
    run->add_option("--suite", run_suite_file, "JSON suite file")->required();
    run->add_option("--seed", run_seed, "response-resolution seed");

    // repro
    auto* repro = app.add_subcommand("repro", "recompute the reference number table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (build->parsed()) {
            Lts l = build_mf.build(limit);
            if (build_minimize != "none") l = minimize(l, relation_from_string(build_minimize));
            print_counts(build_minimize == "none" ? "model" : "minimized model", l);
            if (!build_out.empty()) aut_write(l, build_out);
            return 0;
        }
        if (cmp->parsed()) {
            Lts a = aut_read(cmp_a), b = aut_read(cmp_b);
            auto prep = [&](Lts l) {
                if (cmp_drop_ids)
                    l = rename_labels(l, [](const Label& lab) {
                        Label out = lab;
                        if (!out.offers.empty()) out.offers.erase(out.offers.begin());
                        return out;
                    });
                if (!cmp_hide.empty())
                    l = hide(l, std::set<std::string>(cmp_hide.begin(), cmp_hide.end()));
                return l;
            };
            EquivalenceResult r = equivalent(prep(a), prep(b), relation_from_string(cmp_rel));
            if (r) {
                std::cout << "equivalent (" << cmp_rel << ")\n";
                return 0;
            }
            std::cout << "inequivalent (" << cmp_rel << ")";
            if (!r.trace.empty()) {
                std::cout << "; distinguishing trace:";
                for (const auto& lab : r.trace) std::cout << " " << to_string(lab);
            }
            if (!r.detail.empty()) std::cout << "; " << r.detail;
            std::cout << "\n";
            return kExitSemantic;
        }
        if (gen_ctg->parsed() || gen_suite->parsed()) {
            bool suite_mode = gen_suite->parsed();
            const ModelFlags& mf = suite_mode ? suite_mf : ctg_mf;
            const std::string scenario = suite_mode ? suite_scenario : ctg_scenario;
            const std::string tp_file = suite_mode ? suite_tp : ctg_tp;
            if (scenario.empty() && tp_file.empty())
                throw CLI::ValidationError("--scenario or --tp is required");
            if (suite_mode && suite_coverage != "all-choices")
                throw CLI::ValidationError("unknown coverage criterion: " + suite_coverage);
            Lts model = scenario_model(mf, limit);
            TestPurpose tp = load_tp(scenario, tp_file);
            Ctg ctg = extract_ctg(product(model, tp), soc_controllable_gate);
            print_counts("ctg", ctg.lts);
            std::cout << "choices: " << choices(ctg)
                      << " (decision states: " << decision_states(ctg) << ")\n";
            if (!suite_mode) {
                if (!ctg_out.empty()) {
                    aut_write(ctg.lts, ctg_out);
                    nlohmann::ordered_json notes;
                    notes["pass-state"] = ctg.pass_state;
                    notes["inconclusive-state"] = ctg.inconclusive_state;
                    notes["controllable-gates"] = soc_request_gates();
                    notes["observable-gates"] = soc_response_gates();
                    std::ofstream os(ctg_out + ".notes.json");
                    os << notes.dump(2) << "\n";
                }
                return 0;
            }
            dsl::Suite s;
            s.model_digest = dsl::model_digest(model);
            s.scenario_id = scenario.empty() ? tp.name : scenario;
            s.tests = extract_test_suite(ctg);
            std::cout << "suite: " << s.tests.size() << " tests\n";
            if (!suite_out.empty()) dsl::write_suite(s, suite_out);
            return 0;
        }
        if (infer->parsed()) {
            if (infer_scenario.empty() && infer_vi.empty())
                throw CLI::ValidationError("--scenario or --vi is required");
            ConstraintModel m = infer_model.empty()
                                    ? monolithic_ri_model()
                                    : dsl::parse_pss_model(read_file(infer_model), infer_model);
            VerificationIntent vi =
                infer_vi.empty() ? scenario_vi(infer_scenario, m)
                                 : dsl::parse_vi(read_file(infer_vi), m, infer_vi);
            InferOptions opts;
            opts.sample = infer_sample;
            opts.seed = infer_seed;
            InferredTest t = backward_infer(m, vi, opts);
            std::cout << "inferred test (" << t.length() << " steps):\n";
            for (const auto& step : t.steps) {
                std::cout << "  " << step.action;
                if (step.matched_handle >= 0)
                    std::cout << "  [" << vi.handles[step.matched_handle].name << "]";
                std::cout << "\n";
            }
            return 0;
        }
        if (run->parsed()) {
            Lts model = scenario_model(run_mf, limit);
            Lts reference = run_mf.mutation.empty()
                                ? model
                                : minimize(ModelFlags{run_mf.sources, run_mf.multitasking,
                                                      run_mf.params_file, ""}
                                               .build(limit),
                                           Relation::strong);
            std::vector<dsl::Diagnostic> warnings;
            dsl::Suite s =
                dsl::read_suite(run_suite_file, dsl::model_digest(reference), &warnings);
            for (const auto& w : warnings) std::cerr << w.to_string() << "\n";
            Executor ex(model, soc_controllable_gate);
            int pass = 0, inconclusive = 0, fail = 0;
            for (const auto& tc : s.tests) {
                switch (ex.run(tc, run_seed + static_cast<uint64_t>(tc.id))) {
                    case Verdict::pass: ++pass; break;
                    case Verdict::inconclusive: ++inconclusive; break;
                    case Verdict::fail: ++fail; break;
                }
            }
            std::cout << "PASS " << pass << "  INCONCLUSIVE " << inconclusive << "  FAIL "
                      << fail << "\n";
            return fail > 0 ? kExitSemantic : 0;
        }
        if (repro->parsed()) return cmd_repro(limit);
    } catch (const dsl::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSemantic;
    }
    return kExitUsage;
}
