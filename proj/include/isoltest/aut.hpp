#pragma once

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "isoltest/lts.hpp"

namespace isoltest {

struct AutParseError : std::runtime_error {
    int line;
    AutParseError(int line_, const std::string& msg)
        : std::runtime_error("aut:" + std::to_string(line_) + ": " + msg), line(line_) {}
};

// Ordinal lookup for offer values read back from text. Integers order as
// themselves; the enumerations shared by the SoC and constraint models have
// fixed positions; anything else gets ordinal 0.
inline int builtin_ordinal(const std::string& text) {
    if (!text.empty() && (std::isdigit(static_cast<unsigned char>(text[0])) ||
                          text[0] == '-'))
        return std::atoi(text.c_str());
    if (text == "NONSECURE" || text == "NONPRIVILEGED" || text == "DATA1" ||
        text == "IDLE" || text == "FALSE")
        return 0;
    if (text == "SECURE" || text == "PRIVILEGED" || text == "DATA2" ||
        text == "READ" || text == "TRUE")
        return 1;
    if (text == "WRITE") return 2;
    if (text == "PROTECTION") return 3;
    return 0;
}

inline Label parse_label_text(const std::string& s) {
    if (s == "i") return tau_label();
    Label l;
    std::istringstream in(s);
    std::string tok;
    in >> l.gate;
    while (in >> tok) {
        if (tok[0] == '!') tok = tok.substr(1);
        l.offers.push_back(Value{tok, builtin_ordinal(tok)});
    }
    return l;
}

inline void aut_write(const Lts& l, std::ostream& os) {
    os << "des (" << l.initial() << ", " << l.num_transitions() << ", "
       << l.num_states() << ")\n";
    for (const auto& t : l.transitions())
        os << "(" << t.from << ", \"" << to_string(l.label(t.label)) << "\", "
           << t.to << ")\n";
}

inline void aut_write(const Lts& l, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    aut_write(l, os);
}

inline Lts aut_read(std::istream& is) {
    std::string line;
    int lineno = 1;
    if (!std::getline(is, line)) throw AutParseError(1, "missing des header");
    long init, ntrans, nstates;
    if (std::sscanf(line.c_str(), "des (%ld, %ld, %ld)", &init, &ntrans, &nstates) != 3 &&
        std::sscanf(line.c_str(), "des(%ld,%ld,%ld)", &init, &ntrans, &nstates) != 3)
        throw AutParseError(1, "malformed header: " + line);
    if (nstates < 1 || init < 0 || init >= nstates)
        throw AutParseError(1, "initial state out of range");
    Lts l(static_cast<int>(nstates), static_cast<int>(init));
    long seen = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        size_t open = line.find('(');
        size_t q1 = line.find('"');
        size_t q2 = line.rfind('"');
        size_t close = line.rfind(')');
        if (open == std::string::npos || q1 == std::string::npos || q2 <= q1 ||
            close == std::string::npos)
            throw AutParseError(lineno, "malformed transition: " + line);
        int from = std::atoi(line.substr(open + 1, q1 - open - 1).c_str());
        size_t tpos = line.find_first_of("0123456789", q2 + 1);
        if (tpos == std::string::npos || tpos >= close)
            throw AutParseError(lineno, "malformed transition: " + line);
        int to = std::atoi(line.substr(tpos, close - tpos).c_str());
        std::string lab = line.substr(q1 + 1, q2 - q1 - 1);
        if (from < 0 || from >= nstates || to < 0 || to >= nstates)
            throw AutParseError(lineno, "state out of range");
        l.add_transition(from, parse_label_text(lab), to);
        ++seen;
    }
    if (seen != ntrans)
        throw AutParseError(lineno, "transition count mismatch: header says " +
                                        std::to_string(ntrans) + ", found " +
                                        std::to_string(seen));
    return l;
}

inline Lts aut_read(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open: " + path);
    return aut_read(is);
}

}  // namespace isoltest
