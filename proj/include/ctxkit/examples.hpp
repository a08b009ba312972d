#ifndef CTXKIT_EXAMPLES_HPP
#define CTXKIT_EXAMPLES_HPP

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ctxkit/error.hpp"
#include "ctxkit/inchworm.hpp"
#include "ctxkit/scenario_file.hpp"

namespace ctxkit {

namespace examples {

/// Alice measures a1 or a2, Bob b1 or b2; the four edges are the contexts.
inline ScenarioPtr square(const std::string& name = "square") {
  return make_scenario(name, {boolean_domain()}, {{"a1", "B"}, {"a2", "B"}, {"b1", "B"}, {"b2", "B"}},
                       {{"a1", "b1"}, {"a1", "b2"}, {"a2", "b1"}, {"a2", "b2"}});
}

/// The square with a third observer c who joins every edge.
inline ScenarioPtr charlie_complex(const std::string& name = "charlie") {
  return make_scenario(name, {boolean_domain()},
                       {{"a1", "B"}, {"a2", "B"}, {"b1", "B"}, {"b2", "B"}, {"c", "B"}},
                       {{"a1", "b1", "c"}, {"a2", "b1", "c"}, {"a1", "b2", "c"}, {"a2", "b2", "c"}});
}

inline PresheafModel facet_model(const ScenarioPtr& scn, const std::map<std::string, std::vector<std::string>>& rows) {
  std::map<Context, SectionSet, CanonicalLess> data;
  for (Context f : scn->facets()) {
    std::string key;
    for (const auto& n : scn->names_of(f)) key += (key.empty() ? "" : " ") + n;
    auto it = rows.find(key);
    data.emplace(f, it == rows.end() ? SectionSet::full(*scn, f) : section_set_from_strings(*scn, f, it->second));
  }
  return model_from_facet_sections(scn, data);
}

inline ScenarioFile with_theory(const std::string& name, const ScenarioPtr& scn, const std::vector<std::string>& formulas) {
  auto sig = std::make_shared<const Signature>(scn);
  return ScenarioFile{name, scn, sig, std::nullopt, parse_theory(sig, formulas)};
}

inline ScenarioFile hardy() {
  auto scn = square("hardy");
  ScenarioFile f = with_theory("hardy", scn, {"~a1 \\/ ~b2", "~a2 \\/ ~b1", "a2 \\/ b2"});
  f.model = facet_model(scn, {{"a1 b1", {"00", "01", "10", "11"}},
                              {"a1 b2", {"00", "01", "10"}},
                              {"a2 b1", {"00", "01", "10"}},
                              {"a2 b2", {"01", "10", "11"}}});
  return f;
}

inline ScenarioFile pr_box() {
  auto scn = square("pr_box");
  ScenarioFile f = with_theory("pr_box", scn, {"a1 (+) b1 = 0", "a1 (+) b2 = 0", "a2 (+) b1 = 0", "a2 (+) b2 = 1"});
  f.model = facet_model(scn, {{"a1 b1", {"00", "11"}}, {"a1 b2", {"00", "11"}}, {"a2 b1", {"00", "11"}}, {"a2 b2", {"01", "10"}}});
  return f;
}

inline ScenarioFile square_full() {
  auto scn = square("square_full");
  auto sig = std::make_shared<const Signature>(scn);
  return ScenarioFile{"square_full", scn, sig, PresheafModel::full(scn), std::nullopt};
}

/// Alice's choice of a2 forces b1 = 0 while a1 leaves b1 free.
inline ScenarioFile signal_e() {
  auto scn = square("signal_e");
  ScenarioFile f = with_theory("signal_e", scn, {"a2 /\\ ~b1 \\/ ~a2 /\\ ~b1"});
  f.model = mm_model(*f.theory);
  return f;
}

inline ScenarioFile charlie() { return with_theory("charlie", charlie_complex(), {"a1 = b1", "a1 = c", "a2 = b1"}); }

/// GHZ parities in the four contexts {xa xb xc}, {xa yb yc}, {ya xb yc}, {ya yb xc}.
inline ScenarioFile mermin() {
  auto scn = make_scenario("mermin", {boolean_domain()},
                           {{"xa", "B"}, {"ya", "B"}, {"xb", "B"}, {"yb", "B"}, {"xc", "B"}, {"yc", "B"}},
                           {{"xa", "xb", "xc"}, {"xa", "yb", "yc"}, {"ya", "xb", "yc"}, {"ya", "yb", "xc"}});
  ScenarioFile f = with_theory("mermin", scn,
                               {"xa (+) xb (+) xc = 0", "xa (+) yb (+) yc = 1", "ya (+) xb (+) yc = 1", "ya (+) yb (+) xc = 1"});
  f.model = mm_model(*f.theory);
  return f;
}

inline ScenarioFile spiral(std::size_t k) {
  Theory t = make_spiral_theory(k);
  return ScenarioFile{t.scenario().name(), t.scenario_ptr(), t.signature_ptr(), std::nullopt, t};
}

inline std::vector<std::string> names() { return {"hardy", "pr_box", "square_full", "signal_e", "charlie", "mermin", "spiral_k"}; }

/// Looks up a registry entry; `spiral_K` takes any K >= 2.
inline ScenarioFile get(const std::string& name) {
  if (name == "hardy") return hardy();
  if (name == "pr_box") return pr_box();
  if (name == "square_full") return square_full();
  if (name == "signal_e") return signal_e();
  if (name == "charlie") return charlie();
  if (name == "mermin") return mermin();
  if (name.rfind("spiral_", 0) == 0) {
    std::string k = name.substr(7);
    bool digits = !k.empty() && k.size() < 6;
    for (char c : k) digits = digits && c >= '0' && c <= '9';
    if (digits && std::stoul(k) >= 2) return spiral(std::stoul(k));
  }
  std::string known;
  for (const auto& n : names()) known += (known.empty() ? "" : ", ") + n;
  throw ScenarioError("unknown example '" + name + "' (known: " + known + ")");
}

}  // namespace examples

}  // namespace ctxkit

#endif  // CTXKIT_EXAMPLES_HPP
