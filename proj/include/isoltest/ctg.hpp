#pragma once

#include <deque>
#include <random>

#include "isoltest/tp.hpp"

namespace isoltest {

// ---- Verdicts ------------------------------------------------------------

// Ordered so that the worst verdict dominates when aggregating.
enum class Verdict { pass = 0, inconclusive = 1, fail = 2 };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "PASS";
        case Verdict::inconclusive: return "INCONCLUSIVE";
        case Verdict::fail: return "FAIL";
    }
    return "?";
}

inline Verdict worst(Verdict a, Verdict b) { return a < b ? b : a; }

// Tester-side transition classification: controllable labels are stimuli
// the tester initiates, everything else visible is an observation.
using GateClassifier = std::function<bool(const std::string&)>;

struct EmptyCtgError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- Complete test graph -------------------------------------------------

// Subgraph of the purpose product from which the goal stays reachable.
// All accepting product states are merged into the single `pass_state`;
// observations that leave the goal region lead to `inconclusive_state`
// (present only if such exits exist). Both verdict states are sinks.
struct Ctg {
    Lts lts;
    int pass_state = -1;
    int inconclusive_state = -1;
    std::vector<int> tp_state;  // purpose state per CTG state; -1 for verdict states
    GateClassifier controllable;

    bool is_verdict_state(int s) const {
        return s == pass_state || s == inconclusive_state;
    }
};

inline Ctg extract_ctg(const TpProduct& prod, GateClassifier controllable) {
    const Lts& p = prod.lts;
    int n = p.num_states();

    // Backward reachability towards the accepting states.
    std::vector<std::vector<int>> rev(n);
    for (const auto& t : p.transitions()) rev[t.to].push_back(t.from);
    std::vector<char> goal(n, 0);
    std::deque<int> work;
    for (int s = 0; s < n; ++s)
        if (prod.accept[s]) {
            goal[s] = 1;
            work.push_back(s);
        }
    while (!work.empty()) {
        int s = work.front();
        work.pop_front();
        for (int q : rev[s])
            if (!goal[q]) {
                goal[q] = 1;
                work.push_back(q);
            }
    }
    if (!goal[p.initial()])
        throw EmptyCtgError("goal unreachable from the initial state");

    // Renumber the non-accepting region states; accepting states collapse
    // into PASS. Keep only states forward-reachable inside the region.
    std::vector<int> map(n, -1);
    std::vector<int> order;
    Ctg ctg;
    ctg.controllable = controllable;
    if (prod.accept[p.initial()]) {
        ctg.lts = Lts(1, 0);
        ctg.pass_state = 0;
        ctg.tp_state = {-1};
        return ctg;
    }
    map[p.initial()] = 0;
    order.push_back(p.initial());
    auto out = p.outgoing();
    for (auto& v : out) std::sort(v.begin(), v.end());
    for (size_t i = 0; i < order.size(); ++i) {
        for (const auto& t : out[order[i]]) {
            if (!goal[t.to] || prod.accept[t.to] || map[t.to] >= 0) continue;
            map[t.to] = static_cast<int>(order.size());
            order.push_back(t.to);
        }
    }

    int next = static_cast<int>(order.size());
    ctg.pass_state = next++;
    bool need_inconclusive = false;
    for (int s : order)
        for (const auto& t : out[s])
            if (!goal[t.to] && !controllable(p.label(t.label).gate))
                need_inconclusive = true;
    if (need_inconclusive) ctg.inconclusive_state = next++;

    ctg.lts = Lts(next, 0);
    ctg.tp_state.assign(next, -1);
    for (size_t i = 0; i < order.size(); ++i) ctg.tp_state[i] = prod.tp_state[order[i]];
    for (int s : order) {
        for (const auto& t : out[s]) {
            const Label& lab = p.label(t.label);
            int dst;
            if (prod.accept[t.to])
                dst = ctg.pass_state;
            else if (goal[t.to])
                dst = map[t.to];
            else if (controllable(lab.gate))
                continue;  // a stimulus never leads the tester out of the goal region
            else
                dst = ctg.inconclusive_state;
            ctg.lts.add_transition(map[s], lab, dst);
        }
    }
    ctg.lts.dedupe();
    return ctg;
}

// Number of controllable transitions leaving states where the tester has a
// real decision, i.e. at least two controllable options.
inline int choices(const Ctg& ctg) {
    auto out = ctg.lts.outgoing();
    int total = 0;
    for (const auto& ts : out) {
        int c = 0;
        for (const auto& t : ts)
            if (ctg.controllable(ctg.lts.label(t.label).gate)) ++c;
        if (c >= 2) total += c;
    }
    return total;
}

// Alternative convention: number of decision states.
inline int decision_states(const Ctg& ctg) {
    auto out = ctg.lts.outgoing();
    int total = 0;
    for (const auto& ts : out) {
        int c = 0;
        for (const auto& t : ts)
            if (ctg.controllable(ctg.lts.label(t.label).gate)) ++c;
        if (c >= 2) ++total;
    }
    return total;
}

// ---- Test cases ----------------------------------------------------------

// A test is a finite tree: stimulus nodes carry one controllable label and
// one child; observation nodes list the expected observable labels, each
// with a child (an unlisted observation means FAIL); leaves carry verdicts.
struct TestNode {
    enum class Kind { stim, obs, verdict } kind = Kind::verdict;
    Label label;                                // stimulus
    int child = -1;                             // stimulus continuation
    std::vector<std::pair<Label, int>> branches;  // observations
    Verdict verdict = Verdict::pass;
};

struct TestCase {
    int id = 0;
    std::vector<TestNode> nodes;
    int root = -1;

    std::set<std::string> stimuli() const {
        std::set<std::string> s;
        for (const auto& n : nodes)
            if (n.kind == TestNode::Kind::stim) s.insert(to_string(n.label));
        return s;
    }
};

namespace detail {

// Per-state shortest distance (in transitions) to PASS inside the CTG.
inline std::vector<int> dist_to_pass(const Ctg& ctg) {
    int n = ctg.lts.num_states();
    std::vector<std::vector<int>> rev(n);
    for (const auto& t : ctg.lts.transitions()) rev[t.to].push_back(t.from);
    std::vector<int> dist(n, -1);
    std::deque<int> work;
    dist[ctg.pass_state] = 0;
    work.push_back(ctg.pass_state);
    while (!work.empty()) {
        int s = work.front();
        work.pop_front();
        for (int q : rev[s])
            if (dist[q] < 0) {
                dist[q] = dist[s] + 1;
                work.push_back(q);
            }
    }
    return dist;
}

// Builds the test tree that follows `path` (a transition sequence from the
// CTG initial state). At observation points every enabled observation is
// listed: the path branch continues, a branch into PASS passes, anything
// else ends INCONCLUSIVE.
inline TestCase unfold_path(const Ctg& ctg, const std::vector<Transition>& path) {
    auto out = ctg.lts.outgoing();
    for (auto& v : out) std::sort(v.begin(), v.end());

    TestCase tc;
    auto leaf = [&](Verdict v) {
        tc.nodes.push_back(TestNode{TestNode::Kind::verdict, {}, -1, {}, v});
        return static_cast<int>(tc.nodes.size()) - 1;
    };

    // Build backwards so children exist before their parents.
    int next = leaf(Verdict::pass);
    for (size_t i = path.size(); i-- > 0;) {
        const auto& step = path[i];
        const Label& lab = ctg.lts.label(step.label);
        if (ctg.controllable(lab.gate)) {
            tc.nodes.push_back(
                TestNode{TestNode::Kind::stim, lab, next, {}, Verdict::pass});
        } else {
            TestNode node;
            node.kind = TestNode::Kind::obs;
            for (const auto& t : out[step.from]) {
                const Label& l2 = ctg.lts.label(t.label);
                if (ctg.controllable(l2.gate)) continue;
                if (t == step)
                    node.branches.emplace_back(l2, next);
                else if (t.to == ctg.pass_state)
                    node.branches.emplace_back(l2, leaf(Verdict::pass));
                else
                    node.branches.emplace_back(l2, leaf(Verdict::inconclusive));
            }
            tc.nodes.push_back(std::move(node));
        }
        next = static_cast<int>(tc.nodes.size()) - 1;
    }
    tc.root = next;
    return tc;
}

// Shortest transition path from `from` to `to`, breaking ties towards the
// lexicographically least transition so extraction is deterministic.
inline std::vector<Transition> shortest_path(const Ctg& ctg, int from, int to) {
    auto out = ctg.lts.outgoing();
    for (auto& v : out) std::sort(v.begin(), v.end());
    std::vector<Transition> via(ctg.lts.num_states(), Transition{-1, -1, -1});
    std::vector<char> seen(ctg.lts.num_states(), 0);
    std::deque<int> work;
    seen[from] = 1;
    work.push_back(from);
    while (!work.empty()) {
        int s = work.front();
        work.pop_front();
        if (s == to) break;
        if (ctg.is_verdict_state(s)) continue;
        for (const auto& t : out[s])
            if (!seen[t.to]) {
                seen[t.to] = 1;
                via[t.to] = t;
                work.push_back(t.to);
            }
    }
    if (!seen[to]) throw std::logic_error("ctg: no path to target state");
    std::vector<Transition> path;
    for (int s = to; s != from; s = via[s].from) path.push_back(via[s]);
    std::reverse(path.begin(), path.end());
    return path;
}

}  // namespace detail

// One test per yet-uncovered controllable transition: shortest path to its
// source, the transition itself, then the shortest continuation to PASS.
// Greedy: stimuli already exercised by earlier tests are not re-targeted.
inline std::vector<TestCase> extract_test_suite(const Ctg& ctg) {
    auto dist = detail::dist_to_pass(ctg);
    std::vector<Transition> targets;
    for (const auto& t : ctg.lts.transitions())
        if (ctg.controllable(ctg.lts.label(t.label).gate)) targets.push_back(t);
    std::sort(targets.begin(), targets.end());

    std::set<Transition> covered;
    std::vector<TestCase> suite;
    for (const auto& target : targets) {
        if (covered.count(target)) continue;
        std::vector<Transition> path = detail::shortest_path(ctg, ctg.lts.initial(), target.from);
        path.push_back(target);
        if (target.to != ctg.pass_state) {
            auto tail = detail::shortest_path(ctg, target.to, ctg.pass_state);
            path.insert(path.end(), tail.begin(), tail.end());
        }
        for (const auto& t : path)
            if (ctg.controllable(ctg.lts.label(t.label).gate)) covered.insert(t);
        TestCase tc = detail::unfold_path(ctg, path);
        tc.id = static_cast<int>(suite.size());
        suite.push_back(std::move(tc));
    }
    (void)dist;
    return suite;
}

// One random controllable unfolding: a seeded walk that wanders for a
// bounded number of steps and then steers to PASS along shortest paths.
inline TestCase extract_single_test(const Ctg& ctg, uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto dist = detail::dist_to_pass(ctg);
    auto out = ctg.lts.outgoing();
    for (auto& v : out) std::sort(v.begin(), v.end());

    std::vector<Transition> path;
    int cur = ctg.lts.initial();
    int wander = std::uniform_int_distribution<int>(0, 2 * static_cast<int>(dist[cur] + 4))(rng);
    for (int i = 0; i < wander && !ctg.is_verdict_state(cur); ++i) {
        std::vector<Transition> opts;
        for (const auto& t : out[cur])
            if (t.to != ctg.inconclusive_state) opts.push_back(t);
        if (opts.empty()) break;
        auto t = opts[std::uniform_int_distribution<size_t>(0, opts.size() - 1)(rng)];
        path.push_back(t);
        cur = t.to;
    }
    if (cur != ctg.pass_state) {
        auto tail = detail::shortest_path(ctg, cur, ctg.pass_state);
        path.insert(path.end(), tail.begin(), tail.end());
    }
    TestCase tc = detail::unfold_path(ctg, path);
    tc.id = 0;
    return tc;
}

// ---- Simulated execution -------------------------------------------------

// Runs tests against an implementation LTS. Stimuli must be accepted
// (otherwise the run is inconclusive); among the implementation's enabled
// observable responses one is drawn with the seeded generator; a response
// the test does not list is a failure. The executor precomputes the
// adjacency once so large suites replay cheaply.
class Executor {
public:
    Executor(const Lts& impl, GateClassifier controllable)
        : impl_(impl), controllable_(std::move(controllable)), out_(impl.outgoing()) {
        for (auto& v : out_) std::sort(v.begin(), v.end());
    }

    // The executor keeps a reference to the implementation.
    Executor(Lts&&, GateClassifier) = delete;

    Verdict run(const TestCase& tc, uint64_t seed) const;

private:
    const Lts& impl_;
    GateClassifier controllable_;
    std::vector<std::vector<Transition>> out_;
};

inline Verdict Executor::run(const TestCase& tc, uint64_t seed) const {
    std::mt19937_64 rng(seed);
    const Lts& impl = impl_;
    const auto& out = out_;
    const auto& controllable = controllable_;

    auto closure = [&](std::set<int> s) {
        std::deque<int> work(s.begin(), s.end());
        while (!work.empty()) {
            int q = work.front();
            work.pop_front();
            for (const auto& t : out[q])
                if (t.label == Lts::kTau && s.insert(t.to).second) work.push_back(t.to);
        }
        return s;
    };

    std::set<int> cur = closure({impl.initial()});
    int node = tc.root;
    while (true) {
        const TestNode& n = tc.nodes.at(node);
        switch (n.kind) {
            case TestNode::Kind::verdict:
                return n.verdict;
            case TestNode::Kind::stim: {
                std::set<int> next;
                for (int s : cur)
                    for (const auto& t : out[s])
                        if (impl.label(t.label) == n.label) next.insert(t.to);
                if (next.empty()) return Verdict::inconclusive;  // stimulus refused
                cur = closure(std::move(next));
                node = n.child;
                break;
            }
            case TestNode::Kind::obs: {
                std::set<Label> enabled;
                for (int s : cur)
                    for (const auto& t : out[s]) {
                        const Label& l = impl.label(t.label);
                        if (!l.is_tau() && !controllable(l.gate)) enabled.insert(l);
                    }
                if (enabled.empty()) return Verdict::inconclusive;  // quiescent
                std::vector<Label> pool(enabled.begin(), enabled.end());
                const Label& got =
                    pool[std::uniform_int_distribution<size_t>(0, pool.size() - 1)(rng)];
                int branch = -1;
                for (const auto& [lab, child] : n.branches)
                    if (lab == got) {
                        branch = child;
                        break;
                    }
                if (branch < 0) return Verdict::fail;
                std::set<int> next;
                for (int s : cur)
                    for (const auto& t : out[s])
                        if (impl.label(t.label) == got) next.insert(t.to);
                cur = closure(std::move(next));
                node = branch;
                break;
            }
        }
    }
}

inline Verdict execute(const TestCase& tc, const Lts& impl, GateClassifier controllable,
                       uint64_t seed) {
    return Executor(impl, std::move(controllable)).run(tc, seed);
}

inline Verdict execute_suite(const std::vector<TestCase>& suite, const Lts& impl,
                             GateClassifier controllable, uint64_t seed) {
    Executor ex(impl, std::move(controllable));
    Verdict v = Verdict::pass;
    for (const auto& tc : suite)
        v = worst(v, ex.run(tc, seed + static_cast<uint64_t>(tc.id)));
    return v;
}

}  // namespace isoltest
