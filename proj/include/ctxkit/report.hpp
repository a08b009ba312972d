#ifndef CTXKIT_REPORT_HPP
#define CTXKIT_REPORT_HPP

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctxkit/contextuality.hpp"
#include "ctxkit/inchworm.hpp"
#include "ctxkit/model.hpp"
#include "ctxkit/xor_avn.hpp"

namespace ctxkit::report {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

inline Json context_json(const Scenario& scn, Context c) { return Json(scn.names_of(c)); }

inline Json section_set_json(const Scenario& scn, const SectionSet& s) {
  return Json{{"context", context_json(scn, s.context())}, {"sections", section_strings(scn, s)}};
}

inline Json model_json(const PresheafModel& a) {
  Json contexts = Json::array();
  for (const SectionSet& s : a.sets()) contexts.push_back(section_set_json(a.scenario(), s));
  return Json{{"empty_model", a.is_empty()}, {"contexts", contexts}};
}

inline Json check(const PresheafModel& a) {
  const Scenario& scn = a.scenario();
  auto ns = check_no_signalling(a);
  Json witnesses = Json::array();
  for (const auto& w : ns.witnesses)
    witnesses.push_back({{"smaller", context_json(scn, w.smaller)},
                         {"larger", context_json(scn, w.larger)},
                         {"section", section_string(scn, w.section)}});
  return Json{{"separated", is_separated(a)},
              {"sheaf", is_sheaf(a)},
              {"no_signalling", ns.no_signalling},
              {"witnesses", witnesses}};
}

inline Json contextuality(const PresheafModel& a) {
  const Scenario& scn = a.scenario();
  ContextualityReport r = ctxkit::contextuality(a);
  Json non_extending = Json::array();
  for (const SectionSet& s : r.non_extending)
    if (!s.empty()) non_extending.push_back(section_set_json(scn, s));
  return Json{{"logically_contextual", r.logically_contextual},
              {"strongly_contextual", r.strongly_contextual},
              {"empty_model", r.empty_model},
              {"global_section_count", r.global_sections.size()},
              {"non_extending", non_extending}};
}

inline Json join(const PresheafModel& a) {
  const Scenario& scn = a.scenario();
  std::vector<std::string> rows;
  for (const Section& g : global_sections(a)) rows.push_back(section_string(scn, g));
  return Json{{"variables", context_json(scn, scn.universe())}, {"global_sections", rows}};
}

inline Json trace_json(const Theory& gamma, const DerivationTrace& t) {
  const Scenario& scn = gamma.scenario();
  Json steps = Json::array();
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const TraceStep& s = t.steps[i];
    Json step{{"index", i},
              {"context", context_json(scn, s.context)},
              {"direction", direction_name(s.direction)},
              {"constraint", section_strings(scn, s.constraint)},
              {"formula", to_string(render_constraint(scn, s.constraint), scn)},
              {"premises", Json{{"formulas", s.formulas}, {"steps", s.steps}}}};
    if (s.source) step["source"] = context_json(scn, *s.source);
    steps.push_back(std::move(step));
  }
  return Json{{"steps", steps},
              {"conclusion", Json{{"context", context_json(scn, t.conclusion_context)}, {"formula", to_string(t.goal, scn)}}}};
}

inline Json entail(const Theory& gamma, const Formula& goal, const EntailmentResult& r, bool with_trace) {
  Json out{{"goal", to_string(goal, gamma.scenario())}, {"entailed", r.entailed}};
  if (r.entailed && with_trace && r.trace) {
    out["trace"] = trace_json(gamma, *r.trace);
    out["trace_valid"] = validate_trace(gamma, *r.trace).valid;
  }
  if (r.countermodel) out["countermodel"] = model_json(*r.countermodel);
  return out;
}

inline Json interior(const PresheafModel& a) {
  InteriorResult r = ns_interior_with_provenance(a);
  return Json{{"changed", !(r.model == a)},
              {"revisions", r.events.size()},
              {"passes", r.passes},
              {"interior_empty", r.model.is_empty()},
              {"model", model_json(r.model)}};
}

inline Json saturated(const Theory& gamma) {
  PresheafModel m = mm_model(gamma);
  Json out = check(m);
  return Json{{"saturated", out["no_signalling"]}, {"witnesses", out["witnesses"]}};
}

inline Json avn(const Theory& gamma) {
  const Scenario& scn = gamma.scenario();
  XorExtraction x = extract_xor(gamma);
  Json eqs = Json::array();
  for (const auto& e : x.equations) eqs.push_back({{"formula", *e.formula}, {"equation", render_equation(scn, e)}});
  Json out{{"equations", eqs}, {"skipped", x.skipped}};
  auto cert = avn_certificate(x.equations);
  if (cert) {
    std::string sum;
    std::vector<std::size_t> formulas;
    for (std::size_t i : cert->equations) {
      sum += (sum.empty() ? "" : " + ") + std::string("(") + render_equation(scn, x.equations[i]) + ")";
      formulas.push_back(*x.equations[i].formula);
    }
    out["certificate"] = Json{{"equations", cert->equations}, {"formulas", formulas}, {"sum", sum + " gives 0 = 1"}};
  } else {
    out["certificate"] = nullptr;
  }
  out["xor_inconsistent"] = cert.has_value();
  // The brute-force cross-check is skipped (null) when X is too large to enumerate.
  try {
    ConsistencyResult g = global_consistency(gamma);
    out["globally_consistent"] = g.consistent;
    out["witness"] = g.witness ? Json(section_string(scn, *g.witness)) : Json(nullptr);
  } catch (const ResourceError&) {
    out["globally_consistent"] = nullptr;
    out["witness"] = nullptr;
  }
  return out;
}

inline Json spiral(const SpiralReport& r) {
  return Json{{"k", r.k}, {"interior_empty", r.interior_empty}, {"iterations", r.iterations}, {"revisions", r.revisions}};
}

}  // namespace ctxkit::report

#endif  // CTXKIT_REPORT_HPP
