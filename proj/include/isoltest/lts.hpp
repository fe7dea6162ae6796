#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace isoltest {

// Typed offer value carried on a transition label. Equality is by spelling;
// `ord` places the value inside its (finite, ordered) domain and is what
// guard comparisons use.
struct Value {
    std::string text;
    int ord = 0;

    friend bool operator==(const Value& a, const Value& b) { return a.text == b.text; }
    friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }
    friend bool operator<(const Value& a, const Value& b) { return a.text < b.text; }
};

inline Value int_value(long v) { return Value{std::to_string(v), static_cast<int>(v)}; }

// A visible label is a gate plus ordered offers; the internal step is the
// distinguished label with an empty gate, unequal to every visible label.
struct Label {
    std::string gate;
    std::vector<Value> offers;

    bool is_tau() const { return gate.empty(); }

    friend bool operator==(const Label& a, const Label& b) {
        return a.gate == b.gate && a.offers == b.offers;
    }
    friend bool operator<(const Label& a, const Label& b) {
        if (a.gate != b.gate) return a.gate < b.gate;
        return std::lexicographical_compare(a.offers.begin(), a.offers.end(),
                                            b.offers.begin(), b.offers.end());
    }
};

inline Label tau_label() { return Label{}; }

// Rendering used both by the AUT writer and everywhere a label is shown to
// the user: GATE !v1 !v2, the internal step as "i".
inline std::string to_string(const Label& l) {
    if (l.is_tau()) return "i";
    std::string s = l.gate;
    for (const auto& o : l.offers) {
        s += " !";
        s += o.text;
    }
    return s;
}

struct Transition {
    int from;
    int label;  // index into Lts::labels
    int to;

    friend bool operator==(const Transition& a, const Transition& b) {
        return a.from == b.from && a.label == b.label && a.to == b.to;
    }
    friend bool operator<(const Transition& a, const Transition& b) {
        if (a.from != b.from) return a.from < b.from;
        if (a.label != b.label) return a.label < b.label;
        return a.to < b.to;
    }
};

// Explicit labeled transition system over dense state indices, with an
// interned label table. Index 0 of the table is reserved for tau.
class Lts {
public:
    Lts() { labels_.push_back(tau_label()); }

    explicit Lts(int n_states, int initial = 0) : Lts() {
        n_states_ = n_states;
        initial_ = initial;
    }

    int num_states() const { return n_states_; }
    int initial() const { return initial_; }
    void set_initial(int s) { initial_ = s; }

    int add_state() { return n_states_++; }
    void ensure_states(int n) { n_states_ = std::max(n_states_, n); }

    static constexpr int kTau = 0;

    int intern(const Label& l) {
        if (l.is_tau()) return kTau;
        auto key = to_string(l);
        auto it = label_index_.find(key);
        if (it != label_index_.end()) return it->second;
        int id = static_cast<int>(labels_.size());
        labels_.push_back(l);
        label_index_.emplace(std::move(key), id);
        return id;
    }

    const Label& label(int id) const { return labels_.at(id); }
    int num_interned_labels() const { return static_cast<int>(labels_.size()); }

    void add_transition(int from, const Label& l, int to) {
        add_transition_id(from, intern(l), to);
    }

    void add_transition_id(int from, int label_id, int to) {
        if (from < 0 || from >= n_states_ || to < 0 || to >= n_states_)
            throw std::invalid_argument("transition endpoint out of range");
        transitions_.push_back(Transition{from, label_id, to});
        sorted_ = false;
    }

    const std::vector<Transition>& transitions() const { return transitions_; }
    int num_transitions() const { return static_cast<int>(transitions_.size()); }

    // Drops duplicate (from, label, to) triples.
    void dedupe() {
        std::sort(transitions_.begin(), transitions_.end());
        transitions_.erase(std::unique(transitions_.begin(), transitions_.end()),
                           transitions_.end());
        sorted_ = true;
    }

    // Distinct visible labels occurring on transitions; tau is excluded.
    // This is the counting convention used in all reported sizes.
    int num_visible_labels() const {
        std::set<int> seen;
        for (const auto& t : transitions_)
            if (t.label != kTau) seen.insert(t.label);
        return static_cast<int>(seen.size());
    }

    bool has_tau_transition() const {
        for (const auto& t : transitions_)
            if (t.label == kTau) return true;
        return false;
    }

    // Outgoing adjacency, built on demand after mutation phases.
    std::vector<std::vector<Transition>> outgoing() const {
        std::vector<std::vector<Transition>> out(n_states_);
        for (const auto& t : transitions_) out[t.from].push_back(t);
        return out;
    }

    friend Lts hide(const Lts& l, const std::set<std::string>& gates);
    friend Lts rename_labels(const Lts& l, const std::function<Label(const Label&)>& f);

private:
    int n_states_ = 0;
    int initial_ = 0;
    std::vector<Transition> transitions_;
    std::vector<Label> labels_;
    std::unordered_map<std::string, int> label_index_;
    bool sorted_ = false;
};

// Relabels every transition whose gate is in `gates` to tau.
inline Lts hide(const Lts& l, const std::set<std::string>& gates) {
    Lts r(l.num_states(), l.initial());
    for (const auto& t : l.transitions_) {
        const Label& lab = l.label(t.label);
        if (!lab.is_tau() && gates.count(lab.gate))
            r.add_transition_id(t.from, Lts::kTau, t.to);
        else
            r.add_transition(t.from, lab, t.to);
    }
    r.dedupe();
    return r;
}

// Pointwise label mapping; f must keep tau internal. Duplicates created by
// merging labels are dropped.
inline Lts rename_labels(const Lts& l, const std::function<Label(const Label&)>& f) {
    Lts r(l.num_states(), l.initial());
    for (const auto& t : l.transitions_) {
        Label mapped = f(l.label(t.label));
        if (l.label(t.label).is_tau() && !mapped.is_tau())
            throw std::invalid_argument("rename must map tau to tau");
        r.add_transition(t.from, mapped, t.to);
    }
    r.dedupe();
    return r;
}

// Restriction to states reachable from the initial state, renumbered in
// breadth-first order so results are bit-stable.
inline Lts restrict_reachable(const Lts& l) {
    std::vector<int> order(l.num_states(), -1);
    std::vector<int> queue;
    order[l.initial()] = 0;
    queue.push_back(l.initial());
    auto out = l.outgoing();
    for (size_t i = 0; i < queue.size(); ++i) {
        auto& ts = out[queue[i]];
        std::sort(ts.begin(), ts.end());
        for (const auto& t : ts) {
            if (order[t.to] < 0) {
                order[t.to] = static_cast<int>(queue.size());
                queue.push_back(t.to);
            }
        }
    }
    Lts r(static_cast<int>(queue.size()), 0);
    for (const auto& t : l.transitions())
        if (order[t.from] >= 0 && order[t.to] >= 0)
            r.add_transition(order[t.from], l.label(t.label), order[t.to]);
    r.dedupe();
    return r;
}

struct LtsCounts {
    int states;
    int transitions;
    int labels;
};

inline LtsCounts counts(const Lts& l) {
    return LtsCounts{l.num_states(), l.num_transitions(), l.num_visible_labels()};
}

}  // namespace isoltest
