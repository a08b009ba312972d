#ifndef CTXKIT_INCHWORM_HPP
#define CTXKIT_INCHWORM_HPP

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ctxkit/error.hpp"
#include "ctxkit/logic.hpp"
#include "ctxkit/model.hpp"
#include "ctxkit/semantics.hpp"

namespace ctxkit {

/// M[F]Γ together with the theory it came from.
struct TheoryModel {
  Theory theory;
  PresheafModel model;
};

/// A_U = ⋂_{φ∈Γ_U} ⟦φ⟧_U (the full product when Γ_U is empty).
inline PresheafModel mm_model(const Theory& gamma) {
  const Scenario& scn = gamma.scenario();
  std::vector<SectionSet> sets;
  for (Context u : scn.members()) {
    SectionSet s = SectionSet::full(scn, u);
    for (std::size_t i : gamma.gamma_at(u)) s.intersect_with(denote(gamma.signature(), gamma[i], u));
    sets.push_back(std::move(s));
  }
  return PresheafModel(gamma.scenario_ptr(), std::move(sets));
}

inline TheoryModel mm(const Theory& gamma) { return TheoryModel{gamma, mm_model(gamma)}; }

/// Saturation, decided semantically: M[F]Γ is no-signalling.
inline bool is_saturated(const Theory& gamma) { return is_no_signalling(mm_model(gamma)); }

enum class Direction { Initial, Meet, ProjectDown, LiftUp };

inline const char* direction_name(Direction d) {
  switch (d) {
    case Direction::Initial:
      return "initial";
    case Direction::Meet:
      return "meet";
    case Direction::ProjectDown:
      return "project-down";
    case Direction::LiftUp:
      return "lift-up";
  }
  return "?";
}

/// One productive revision of the interior fixpoint: `removed` cells of
/// `target` were deleted because of the state of `source`.
struct InteriorEvent {
  Direction direction;  // ProjectDown (source ⊃ target) or LiftUp (source ⊂ target)
  Context source;
  Context target;
  std::vector<std::size_t> removed;  // cell indices in the target product
  std::size_t pass;                  // 1-based sweep number
};

struct InteriorResult {
  PresheafModel model;
  std::vector<InteriorEvent> events;
  /// Per member (canonical order) and product cell: the event that removed
  /// the cell, if it was present in the input and later removed.
  std::vector<std::vector<std::optional<std::size_t>>> removed_by;
  /// Sweeps over the pair list, including the final quiet sweep.
  std::size_t passes = 0;
};

/// Largest no-signalling subpresheaf of `a`, by round-robin propagation over
/// codimension-one pairs until a full sweep changes nothing.
inline InteriorResult ns_interior_with_provenance(const PresheafModel& a) {
  const Scenario& scn = a.scenario();
  const auto& cplx = scn.complex();
  std::vector<SectionSet> s = a.sets();
  std::vector<std::vector<std::optional<std::size_t>>> removed_by;
  for (const auto& set : s) removed_by.emplace_back(set.cells());

  // Restriction maps per pair, computed once.
  struct Pair {
    std::size_t u, v;
    std::vector<std::size_t> map;  // cell of V -> cell of U
  };
  std::vector<Pair> pairs;
  for (auto [u, v] : cplx.codim1_pairs()) {
    std::size_t iu = cplx.index_of(u), iv = cplx.index_of(v);
    pairs.push_back({iu, iv, restriction_map(s[iv].product(), s[iu].product())});
  }

  std::vector<InteriorEvent> events;
  std::size_t passes = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    ++passes;
    for (const Pair& p : pairs) {
      SectionSet& su = s[p.u];
      SectionSet& sv = s[p.v];
      // Project down: keep only sections of U that extend into V.
      std::vector<char> hit(su.cells(), 0);
      for (std::size_t i : sv.indices()) hit[p.map[i]] = 1;
      std::vector<std::size_t> gone;
      for (std::size_t i : su.indices())
        if (!hit[i]) gone.push_back(i);
      if (!gone.empty()) {
        for (std::size_t i : gone) {
          su.erase_index(i);
          removed_by[p.u][i] = events.size();
        }
        events.push_back({Direction::ProjectDown, scn.members()[p.v], scn.members()[p.u], gone, passes});
        changed = true;
      }
      // Lift up: drop sections of V whose restriction left U.
      gone.clear();
      for (std::size_t i : sv.indices())
        if (!su.contains_index(p.map[i])) gone.push_back(i);
      if (!gone.empty()) {
        for (std::size_t i : gone) {
          sv.erase_index(i);
          removed_by[p.v][i] = events.size();
        }
        events.push_back({Direction::LiftUp, scn.members()[p.u], scn.members()[p.v], gone, passes});
        changed = true;
      }
    }
  }
  return InteriorResult{PresheafModel(a.scenario_ptr(), std::move(s)), std::move(events), std::move(removed_by), passes};
}

inline PresheafModel ns_interior(const PresheafModel& a) { return ns_interior_with_provenance(a).model; }

struct TraceStep {
  Context context;
  SectionSet constraint;
  Direction direction;
  std::optional<Context> source;     // the other context of a project-down / lift-up
  std::vector<std::size_t> formulas;  // premise formulas, all in Γ_context
  std::vector<std::size_t> steps;     // premise steps, all earlier
};

/// A chain of single-context inferences ending in a constraint at
/// `conclusion_context` that implies the goal there.
struct DerivationTrace {
  std::vector<TraceStep> steps;
  Context conclusion_context;
  Formula goal;
};

namespace detail {

/// Slices the interior provenance down to the events needed to exclude the
/// goal's counter-sections at `target`, then replays them from M[F]Γ.
inline DerivationTrace slice_trace(const Theory& gamma, const PresheafModel& base, const InteriorResult& interior,
                                   const Formula& goal, Context target) {
  const Scenario& scn = gamma.scenario();
  const auto& cplx = scn.complex();
  const Signature& sig = gamma.signature();

  std::set<std::size_t> needed;
  std::vector<std::pair<std::size_t, std::size_t>> work;  // (member, cell) that must be absent
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> maps;
  auto map_for = [&](std::size_t from, std::size_t to) -> const std::vector<std::size_t>& {
    auto key = std::make_pair(from, to);
    auto it = maps.find(key);
    if (it == maps.end())
      it = maps.emplace(key, restriction_map(base.sets()[from].product(), base.sets()[to].product())).first;
    return it->second;
  };

  std::size_t t = cplx.index_of(target);
  SectionSet good = denote(sig, goal, target);
  for (std::size_t i = 0; i < good.cells(); ++i)
    if (!good.contains_index(i)) work.emplace_back(t, i);

  std::set<std::pair<std::size_t, std::size_t>> seen;
  while (!work.empty()) {
    auto [x, cell] = work.back();
    work.pop_back();
    if (!seen.insert({x, cell}).second) continue;
    if (!base.sets()[x].contains_index(cell)) continue;  // excluded by Γ_x directly
    auto e = interior.removed_by[x][cell];
    if (!e) throw LogicError("internal: section survives the interior but is needed for the goal");
    if (!needed.insert(*e).second) continue;
    const InteriorEvent& ev = interior.events[*e];
    std::size_t src = cplx.index_of(ev.source), tgt = cplx.index_of(ev.target);
    for (std::size_t removed : ev.removed) {
      if (ev.direction == Direction::ProjectDown) {
        const auto& m = map_for(src, tgt);
        for (std::size_t j = 0; j < m.size(); ++j)
          if (m[j] == removed) work.emplace_back(src, j);
      } else {
        work.emplace_back(src, map_for(tgt, src)[removed]);
      }
    }
  }

  DerivationTrace trace{{}, target, goal};
  std::vector<SectionSet> cur = base.sets();
  std::vector<std::optional<std::size_t>> last(cur.size());
  auto initial = [&](std::size_t x) {
    auto fs = gamma.gamma_at(scn.members()[x]);
    Direction d = fs.size() >= 2 ? Direction::Meet : Direction::Initial;
    trace.steps.push_back({scn.members()[x], cur[x], d, std::nullopt, std::move(fs), {}});
    last[x] = trace.steps.size() - 1;
  };
  for (std::size_t e : needed) {
    const InteriorEvent& ev = interior.events[e];
    std::size_t src = cplx.index_of(ev.source), tgt = cplx.index_of(ev.target);
    if (!last[src]) initial(src);
    TraceStep step{ev.target, cur[tgt], ev.direction, ev.source, {}, {*last[src]}};
    if (last[tgt]) step.steps.push_back(*last[tgt]);
    else step.formulas = gamma.gamma_at(ev.target);
    step.constraint.intersect_with(transport(scn, cur[src], ev.target));
    cur[tgt] = step.constraint;
    trace.steps.push_back(std::move(step));
    last[tgt] = trace.steps.size() - 1;
  }
  if (!last[t]) initial(t);
  return trace;
}

}  // namespace detail

struct TraceCheck {
  bool valid = true;
  std::optional<std::size_t> step;  // offending step, if any
  std::string reason;
};

/// Recomputes every step from its premises alone and checks the conclusion.
inline TraceCheck validate_trace(const Theory& gamma, const DerivationTrace& trace) {
  const Scenario& scn = gamma.scenario();
  const Signature& sig = gamma.signature();
  auto fail = [](std::optional<std::size_t> i, std::string why) { return TraceCheck{false, i, std::move(why)}; };
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const TraceStep& st = trace.steps[i];
    if (!scn.contains(st.context)) return fail(i, "context is not in the complex");
    if (!(st.constraint.context() == st.context)) return fail(i, "constraint lives over another context");
    SectionSet acc = SectionSet::full(scn, st.context);
    for (std::size_t f : st.formulas) {
      if (f >= gamma.size()) return fail(i, "unknown formula premise");
      if (!gamma[f].free_vars().subset_of(st.context)) return fail(i, "formula premise does not live in the step's context");
      acc.intersect_with(denote(sig, gamma[f], st.context));
    }
    std::size_t cross = 0;
    for (std::size_t j : st.steps) {
      if (j >= i) return fail(i, "premise step does not precede the step");
      const TraceStep& p = trace.steps[j];
      if (p.context == st.context) {
        acc.intersect_with(p.constraint);
        continue;
      }
      ++cross;
      bool down = st.direction == Direction::ProjectDown && st.context.proper_subset_of(p.context);
      bool up = st.direction == Direction::LiftUp && p.context.proper_subset_of(st.context);
      Context diff = down ? p.context.minus(st.context) : st.context.minus(p.context);
      if (!(down || up) || diff.size() != 1 || !st.source || !(*st.source == p.context))
        return fail(i, "premise step context does not match the step direction");
      acc.intersect_with(transport(scn, p.constraint, st.context));
    }
    bool moving = st.direction == Direction::ProjectDown || st.direction == Direction::LiftUp;
    if (cross != (moving ? 1u : 0u)) return fail(i, "wrong number of premises from other contexts");
    if (!(acc == st.constraint)) return fail(i, "constraint does not follow from the premises");
  }
  if (trace.steps.empty()) return fail(std::nullopt, "empty trace");
  const TraceStep& last = trace.steps.back();
  if (!(last.context == trace.conclusion_context)) return fail(std::nullopt, "last step is not at the conclusion context");
  if (!trace.goal.free_vars().subset_of(last.context)) return fail(std::nullopt, "goal does not live in the conclusion context");
  if (!last.constraint.subset_of(denote(sig, trace.goal, last.context)))
    return fail(std::nullopt, "final constraint does not imply the goal");
  return {};
}

struct EntailmentResult {
  bool entailed = false;
  std::optional<DerivationTrace> trace;
  /// The no-signalling interior of M[F]Γ when it falsifies the goal.
  std::optional<PresheafModel> countermodel;
};

/// Γ ⊢_C φ, decided as: the no-signalling interior of M[F]Γ satisfies φ.
inline EntailmentResult inchworm_entails(const Theory& gamma, const Formula& goal, bool want_trace = true) {
  const Scenario& scn = gamma.scenario();
  if (!in_fragment(goal, scn.complex()))
    throw LogicError("goal over " + scn.format(goal.free_vars()) + " is outside the contextual fragment");
  PresheafModel base = mm_model(gamma);
  InteriorResult interior = ns_interior_with_provenance(base);
  EntailmentResult r;
  Context g = goal.free_vars();
  r.entailed = interior.model.at(g).subset_of(denote(gamma.signature(), goal, g));
  if (!r.entailed) {
    r.countermodel = interior.model;
    return r;
  }
  if (want_trace) {
    // Conclude wherever the shortest chain ends; ties go to canonical order.
    for (Context c : scn.members()) {
      if (!g.subset_of(c)) continue;
      DerivationTrace t = detail::slice_trace(gamma, base, interior, goal, c);
      if (!r.trace || t.steps.size() < r.trace->steps.size()) r.trace = std::move(t);
    }
  }
  return r;
}

/// Principal filter model: generator B_U per member (canonical order); the
/// filter at U is every S with B_U ⊆ S.
struct FilterModel {
  ScenarioPtr scenario;
  std::vector<SectionSet> generators;

  const SectionSet& at(Context u) const {
    auto idx = scenario->complex().member_index(u);
    if (!idx) throw ScenarioError("context " + scenario->format(u) + " is not in the complex");
    return generators.at(*idx);
  }
};

inline FilterModel filter_model_of(const PresheafModel& a) { return FilterModel{a.scenario_ptr(), a.sets()}; }

inline FilterModel filtmm(const Theory& gamma) { return filter_model_of(ns_interior(mm_model(gamma))); }

/// ⟦φ⟧_U belongs to the filter at U for every member U ⊇ fv(φ).
inline bool filter_satisfies(const FilterModel& g, const Signature& sig, const Formula& f) {
  for (Context u : g.scenario->members())
    if (f.free_vars().subset_of(u) && !g.at(u).subset_of(denote(sig, f, u))) return false;
  return true;
}

inline bool is_filter_model(const FilterModel& g, const Theory& gamma) {
  const Scenario& scn = *g.scenario;
  if (!(scn == gamma.scenario())) throw ModelError("filter model and theory live over different scenarios");
  if (g.generators.size() != scn.members().size()) return false;
  for (std::size_t i = 0; i < scn.members().size(); ++i)
    if (!(g.generators[i].context() == scn.members()[i])) return false;
  for (Context v : scn.members())
    for (Context u : scn.complex().faces_of(v))
      if (!(image(scn, g.at(v), u) == g.at(u))) return false;
  for (const Formula& f : gamma.formulas())
    if (!filter_satisfies(g, gamma.signature(), f)) return false;
  return true;
}

/// The truncated spiral: a cycle of equalities on the four-edge square
/// closed by a successor step, plus the positivity constraint b2 > 0, over
/// {0..k-1} with addition modulo k.
inline Theory make_spiral_theory(std::size_t k, bool include_positivity = true) {
  if (k < 2) throw LogicError("spiral needs k >= 2");
  auto scn = make_scenario("spiral_" + std::to_string(k), {cyclic_domain("Z" + std::to_string(k), k)},
                           {{"a1", "Z" + std::to_string(k)}, {"a2", "Z" + std::to_string(k)},
                            {"b1", "Z" + std::to_string(k)}, {"b2", "Z" + std::to_string(k)}},
                           {{"a1", "b1"}, {"a1", "b2"}, {"a2", "b1"}, {"a2", "b2"}});
  auto sig = std::make_shared<const Signature>(scn);
  std::vector<std::string> fs{"a1 = b2", "b1 = a1", "a2 = b1", "b2 = a2 + 1"};
  if (include_positivity) fs.push_back("b2 > 0");
  return parse_theory(sig, fs);
}

struct SpiralReport {
  std::size_t k = 0;
  bool interior_empty = false;
  /// Fixpoint sweeps over the pair list, including the final quiet one.
  std::size_t iterations = 0;
  /// Productive revisions (events that removed sections).
  std::size_t revisions = 0;
};

inline SpiralReport spiral_demo(std::size_t k, bool include_positivity = true) {
  Theory gamma = make_spiral_theory(k, include_positivity);
  InteriorResult r = ns_interior_with_provenance(mm_model(gamma));
  return SpiralReport{k, r.model.is_empty(), r.passes, r.events.size()};
}

}  // namespace ctxkit

#endif  // CTXKIT_INCHWORM_HPP
