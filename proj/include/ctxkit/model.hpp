#ifndef CTXKIT_MODEL_HPP
#define CTXKIT_MODEL_HPP

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ctxkit/error.hpp"
#include "ctxkit/scenario.hpp"
#include "ctxkit/section.hpp"

namespace ctxkit {

/// A separated presheaf on a scenario's complex: one section set per member
/// context, closed under restriction (image of A_V lies in A_U for U ⊆ V).
class PresheafModel {
 public:
  /// Builds a model from explicit section sets for every member, in the
  /// complex's canonical member order. Throws ModelError if the subpresheaf
  /// law fails.
  PresheafModel(ScenarioPtr scn, std::vector<SectionSet> sets) : scn_(std::move(scn)), sets_(std::move(sets)) {
    const auto& members = scn_->members();
    if (sets_.size() != members.size()) throw ModelError("expected one section set per member context");
    for (std::size_t i = 0; i < members.size(); ++i)
      if (!(sets_[i].context() == members[i])) throw ModelError("section set stored under the wrong context");
    if (auto bad = first_law_violation()) {
      throw ModelError("subpresheaf law fails: restriction of A" + scn_->format(bad->second) +
                       " is not contained in A" + scn_->format(bad->first));
    }
  }

  /// The full sheaf F: every context carries the whole product.
  static PresheafModel full(ScenarioPtr scn) {
    std::vector<SectionSet> sets;
    for (Context u : scn->members()) sets.push_back(SectionSet::full(*scn, u));
    return PresheafModel(std::move(scn), std::move(sets));
  }

  /// The everywhere-empty presheaf (A_∅ = ∅).
  static PresheafModel empty(ScenarioPtr scn) {
    std::vector<SectionSet> sets;
    for (Context u : scn->members()) sets.emplace_back(*scn, u);
    return PresheafModel(std::move(scn), std::move(sets));
  }

  const Scenario& scenario() const { return *scn_; }
  const ScenarioPtr& scenario_ptr() const { return scn_; }
  const std::vector<SectionSet>& sets() const { return sets_; }

  /// A_U for a member U.
  const SectionSet& at(Context u) const {
    auto idx = scn_->complex().member_index(u);
    if (!idx) throw ScenarioError("context " + scn_->format(u) + " is not in the complex");
    return sets_[*idx];
  }

  /// Replaces A_U for a member (typically non-facet) context and re-validates.
  PresheafModel with_override(const SectionSet& s) const {
    auto idx = scn_->complex().member_index(s.context());
    if (!idx) throw ScenarioError("override context " + scn_->format(s.context()) + " is not in the complex");
    auto sets = sets_;
    sets[*idx] = s;
    return PresheafModel(scn_, std::move(sets));
  }

  /// True for the everywhere-empty presheaf, the one model with A_∅ = ∅.
  bool is_empty() const { return sets_.front().empty(); }

  friend bool operator==(const PresheafModel& a, const PresheafModel& b) {
    return *a.scn_ == *b.scn_ && a.sets_ == b.sets_;
  }

 private:
  std::optional<std::pair<Context, Context>> first_law_violation() const {
    for (auto [u, v] : scn_->complex().codim1_pairs()) {
      if (!image(*scn_, at(v), u).subset_of(at(u))) return std::make_pair(u, v);
    }
    return std::nullopt;
  }

  ScenarioPtr scn_;
  std::vector<SectionSet> sets_;
};

/// Builds a model from facet data: each non-facet U receives the union of
/// the restriction images of the facets containing it.
inline PresheafModel model_from_facet_sections(ScenarioPtr scn, const std::map<Context, SectionSet, CanonicalLess>& facet_data) {
  const Scenario& s = *scn;
  for (const auto& [ctx, set] : facet_data) {
    if (std::find(s.facets().begin(), s.facets().end(), ctx) == s.facets().end())
      throw ScenarioError("sections given for " + s.format(ctx) + ", which is not a facet");
    if (!(set.context() == ctx)) throw ModelError("section set over the wrong context for facet " + s.format(ctx));
  }
  for (Context f : s.facets())
    if (!facet_data.count(f)) throw ScenarioError("no sections given for facet " + s.format(f));

  std::vector<SectionSet> sets;
  for (Context u : s.members()) {
    SectionSet acc(s, u);
    for (Context f : s.facets()) {
      if (!u.subset_of(f)) continue;
      acc.unite_with(image(s, facet_data.at(f), u));
    }
    sets.push_back(std::move(acc));
  }
  return PresheafModel(std::move(scn), std::move(sets));
}

inline const SectionSet& section_set_at(const PresheafModel& a, Context u) { return a.at(u); }

/// Subpresheaf-of-a-sheaf check: restriction images land inside the smaller
/// context's section set for every member pair.
inline bool is_separated(const PresheafModel& a) {
  const Scenario& s = a.scenario();
  for (Context v : s.members())
    for (Context u : s.complex().faces_of(v))
      if (!image(s, a.at(v), u).subset_of(a.at(u))) return false;
  return true;
}

/// Sheaf iff A_U = ∏_{x∈U} A_{x} at every member context.
inline bool is_sheaf(const PresheafModel& a) {
  const Scenario& s = a.scenario();
  for (Context u : s.members()) {
    SectionSet prod = SectionSet::full(s, u);
    for (VarId x : u.vars()) prod.intersect_with(preimage(s, a.at(Context::of({x})), u));
    if (!(prod == a.at(u))) return false;
  }
  return true;
}

struct SignallingWitness {
  Context smaller;
  Context larger;
  Section section;  // in A_smaller, with no extension in A_larger

  friend bool operator==(const SignallingWitness&, const SignallingWitness&) = default;
};

struct NoSignallingReport {
  bool no_signalling = true;
  std::vector<SignallingWitness> witnesses;
};

/// Surjectivity of every restriction A_V → A_U, decided on codimension-one
/// pairs (surjections compose). Witnesses list every unreached section.
inline NoSignallingReport check_no_signalling(const PresheafModel& a) {
  const Scenario& s = a.scenario();
  NoSignallingReport r;
  for (auto [u, v] : s.complex().codim1_pairs()) {
    SectionSet img = image(s, a.at(v), u);
    for (std::size_t i : a.at(u).indices()) {
      if (!img.contains_index(i)) {
        r.no_signalling = false;
        r.witnesses.push_back({u, v, a.at(u).section_at(i)});
      }
    }
  }
  return r;
}

inline bool is_no_signalling(const PresheafModel& a) { return check_no_signalling(a).no_signalling; }

inline bool is_subpresheaf(const PresheafModel& a, const PresheafModel& b) {
  if (!(a.scenario() == b.scenario())) throw ModelError("models live over different scenarios");
  for (std::size_t i = 0; i < a.sets().size(); ++i)
    if (!a.sets()[i].subset_of(b.sets()[i])) return false;
  return true;
}

/// Vertex of a bundle: a variable paired with one of its value indices.
using BundleVertex = std::pair<VarId, std::size_t>;
using Simplex = std::vector<BundleVertex>;  // sorted by variable

/// The bundle π : 𝒜 → C presentation of a model; simplices are sections viewed
/// as vertex sets.
struct BundleModel {
  ScenarioPtr scenario;
  std::set<BundleVertex> vertices;
  std::set<Simplex> simplices;

  std::size_t count_of_dimension(std::size_t vertices_in_simplex) const {
    return static_cast<std::size_t>(std::count_if(simplices.begin(), simplices.end(), [&](const Simplex& s) {
      return s.size() == vertices_in_simplex;
    }));
  }
};

inline Simplex simplex_of(const Section& s) {
  Simplex out;
  auto vars = s.context.vars();
  for (std::size_t i = 0; i < vars.size(); ++i) out.emplace_back(vars[i], s.values[i]);
  return out;
}

inline BundleModel to_bundle(const PresheafModel& a) {
  BundleModel b{a.scenario_ptr(), {}, {}};
  for (const SectionSet& set : a.sets()) {
    for (const Section& sec : set.sections()) {
      Simplex sx = simplex_of(sec);
      if (sx.size() == 1) b.vertices.insert(sx.front());
      b.simplices.insert(std::move(sx));
    }
  }
  return b;
}

inline PresheafModel from_bundle(const BundleModel& b) {
  const Scenario& s = *b.scenario;
  std::vector<SectionSet> sets;
  for (Context u : s.members()) sets.emplace_back(s, u);
  for (const Simplex& sx : b.simplices) {
    Section sec;
    for (const auto& [var, value] : sx) {
      if (var >= s.num_vars()) throw ModelError("bundle vertex over an unknown variable");
      if (sec.context.contains(var))
        throw ModelError("degenerate simplex: two vertices over variable '" + s.variables()[var].name + "'");
      if (value >= s.radix(var)) throw ModelError("bundle vertex value out of range");
      sec.context = sec.context.with(var);
    }
    for (VarId v : sec.context.vars()) {
      auto it = std::find_if(sx.begin(), sx.end(), [&](const BundleVertex& p) { return p.first == v; });
      sec.values.push_back(it->second);
    }
    auto idx = s.complex().member_index(sec.context);
    if (!idx) throw ModelError("simplex lies over " + s.format(sec.context) + ", which is not in the complex");
    for (const auto& vx : sx)
      if (!b.vertices.count(vx)) throw ModelError("simplex uses a vertex missing from the vertex set");
    sets[*idx].insert(sec);
  }
  for (const auto& vx : b.vertices)
    if (!b.simplices.count(Simplex{vx})) throw ModelError("vertex without its 0-simplex");
  try {
    return PresheafModel(b.scenario, std::move(sets));
  } catch (const ModelError&) {
    throw ModelError("bundle simplices are not closed under faces");
  }
}

}  // namespace ctxkit

#endif  // CTXKIT_MODEL_HPP
