#pragma once

#include "isoltest/dsl/pss_parser.hpp"
#include "isoltest/dsl/soc_parser.hpp"
#include "isoltest/dsl/tp_parser.hpp"

namespace isoltest {

// Builtin scenario catalog: each scenario exists both as a test purpose
// (driving CTG extraction on the behavioral model) and as a verification
// intent (driving backward action inference on the constraint model).
//   1 - any rejected request
//   2 - all six responses, interleaved
//   3 - all six responses, in one fixed order
//   4 - write, then read back with strictly higher security/privilege and
//       no protection change in between
//   ext - every transaction for every source/target level combination

inline const std::vector<std::string>& scenario_ids() {
    static const std::vector<std::string> ids{"1", "2", "3", "4", "ext"};
    return ids;
}

// ---- Test purposes -------------------------------------------------------

inline std::string scenario_tp_text(const std::string& id);

namespace catalog_detail {

inline constexpr const char* kTp1 = R"(purpose scenario1 {
  select {
    match REJECT_READ(_)
  } or {
    match REJECT_WRITE(_)
  } or {
    match REJECT_PROTECTION(_)
  }
  accept
}
)";

inline constexpr const char* kTp2 = R"(purpose scenario2 {
  schedule {
    match GRANT_READ(_, _)
  } and {
    match GRANT_WRITE(_)
  } and {
    match GRANT_PROTECTION(_, _, _)
  } and {
    match REJECT_READ(_)
  } and {
    match REJECT_WRITE(_)
  } and {
    match REJECT_PROTECTION(_)
  }
  accept
}
)";

inline constexpr const char* kTp3 = R"(purpose scenario3 {
  match GRANT_READ(_, _)
  match GRANT_WRITE(_)
  match GRANT_PROTECTION(_, _, _)
  match REJECT_READ(_)
  match REJECT_WRITE(_)
  match REJECT_PROTECTION(_)
  accept
}
)";

inline constexpr const char* kTp4 = R"(purpose scenario4 {
  match WRITE(?wid, ?ws, ?wp, ?wd)
  forbid GRANT_PROTECTION(_, _, _) {
    match GRANT_WRITE(?wid)
    match READ(?rid, ?rs, ?rp) where rs >= ws and rp >= wp and (rs > ws or rp > wp)
    match GRANT_READ(?rid, ?rd) where rd == wd
  }
  accept
}
)";

// The extended scenario: for every target level combination (advanced via
// granted protection changes), attempt write, read, and protection change
// from every source level combination.
inline dsl::TpAst extended_ast() {
    using dsl::TpAst;
    using dsl::TpStmt;
    auto lit = [](const char* text) {
        return OfferPattern{OfferPattern::Kind::literal, Value{text, builtin_ordinal(text)}, ""};
    };
    auto wc = [] { return OfferPattern{OfferPattern::Kind::wildcard, {}, ""}; };
    auto match = [](LabelPattern p) {
        TpStmt s;
        s.kind = TpStmt::Kind::match;
        s.pattern = std::move(p);
        return s;
    };

    static const char* secs[] = {"NONSECURE", "SECURE"};
    static const char* privs[] = {"NONPRIVILEGED", "PRIVILEGED"};

    TpAst ast;
    ast.name = "extended";
    bool first_target = true;
    for (const char* tsec : secs)
        for (const char* tpriv : privs) {
            if (!first_target)
                ast.body.push_back(match(
                    LabelPattern{"GRANT_PROTECTION", {wc(), lit(tsec), lit(tpriv)}}));
            first_target = false;
            for (const char* ssec : secs)
                for (const char* spriv : privs) {
                    ast.body.push_back(match(
                        LabelPattern{"WRITE", {wc(), lit(ssec), lit(spriv), wc()}}));
                    ast.body.push_back(
                        match(LabelPattern{"READ", {wc(), lit(ssec), lit(spriv)}}));
                    ast.body.push_back(match(LabelPattern{
                        "PROTECTION", {wc(), lit(ssec), lit(spriv), wc(), wc()}}));
                }
        }
    TpStmt accept;
    accept.kind = TpStmt::Kind::accept;
    ast.body.push_back(accept);
    return ast;
}

}  // namespace catalog_detail

inline std::string scenario_tp_text(const std::string& id) {
    if (id == "1") return catalog_detail::kTp1;
    if (id == "2") return catalog_detail::kTp2;
    if (id == "3") return catalog_detail::kTp3;
    if (id == "4") return catalog_detail::kTp4;
    if (id == "ext") return dsl::unparse_tp(catalog_detail::extended_ast());
    throw std::invalid_argument("unknown scenario id: " + id);
}

inline TestPurpose scenario_tp(const std::string& id) {
    return dsl::parse_tp(scenario_tp_text(id), "scenario-" + id + ".tp");
}

// ---- Verification intents ------------------------------------------------

namespace catalog_detail {

inline constexpr const char* kVi1 = R"(intent scenario1 {
  handle rr : reject_read;
  handle rw : reject_write;
  handle rp : reject_protection;
  activity {
    select {
      rr;
    } or {
      rw;
    } or {
      rp;
    }
  }
}
)";

inline constexpr const char* kVi2 = R"(intent scenario2 {
  handle gr : grant_read;
  handle gw : grant_write;
  handle gp : grant_protection;
  handle rr : reject_read;
  handle rw : reject_write;
  handle rp : reject_protection;
  activity {
    schedule {
      gr;
    } and {
      gw;
    } and {
      gp;
    } and {
      rr;
    } and {
      rw;
    } and {
      rp;
    }
  }
}
)";

inline constexpr const char* kVi3 = R"(intent scenario3 {
  handle gr : grant_read;
  handle gw : grant_write;
  handle gp : grant_protection;
  handle rr : reject_read;
  handle rw : reject_write;
  handle rp : reject_protection;
  activity {
    gr;
    gw;
    gp;
    rr;
    rw;
    rp;
  }
}
)";

inline constexpr const char* kVi4 = R"(intent scenario4 {
  handle w : request_write where in.ssec == in.tsec and in.spriv == in.tpriv;
  handle gw : grant_write;
  handle cc : config_change where out.ssec >= in.ssec and out.spriv >= in.spriv and (out.ssec > in.ssec or out.spriv > in.spriv);
  handle r : request_read;
  handle gr : grant_read;
  activity {
    w;
    gw;
    cc;
    r;
    gr;
  }
  bind w -> gw;
  bind gw -> cc;
  bind cc -> r;
  bind r -> gr;
}
)";

}  // namespace catalog_detail

inline std::string scenario_vi_text(const std::string& id) {
    if (id == "1") return catalog_detail::kVi1;
    if (id == "2") return catalog_detail::kVi2;
    if (id == "3") return catalog_detail::kVi3;
    if (id == "4") return catalog_detail::kVi4;
    throw std::invalid_argument("no verification intent for scenario id: " + id);
}

inline VerificationIntent scenario_vi(const std::string& id, const ConstraintModel& m) {
    return dsl::parse_vi(scenario_vi_text(id), m, "scenario-" + id + ".vi");
}

// ---- Canonical model / parameter texts -----------------------------------

inline std::string catalog_model_text() { return dsl::unparse_pss_model(monolithic_ri_model()); }

inline std::string catalog_soc_text() {
    SocParams p;
    p.n_sources = 8;
    return dsl::unparse_soc_params(p);
}

}  // namespace isoltest
