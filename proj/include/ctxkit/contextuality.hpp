#ifndef CTXKIT_CONTEXTUALITY_HPP
#define CTXKIT_CONTEXTUALITY_HPP

#include <algorithm>
#include <cstddef>
#include <optional>
#include <vector>

#include "ctxkit/model.hpp"

namespace ctxkit {

namespace detail {

/// Backtracking natural join over the facets of a model. Variables are
/// assigned in declaration order; a facet is tested as soon as its last
/// variable is assigned, sparsest facets first.
class Joiner {
 public:
  explicit Joiner(const PresheafModel& a) : a_(a), scn_(a.scenario()), values_(scn_.num_vars(), 0) {
    checks_.resize(scn_.num_vars());
    for (Context f : scn_.facets()) {
      const SectionSet& set = a_.at(f);
      if (f.empty()) {
        empty_facet_blocks_ = set.empty();
        continue;
      }
      auto vars = f.vars();
      checks_[vars.back()].push_back(&set);
    }
    for (auto& c : checks_)
      std::stable_sort(c.begin(), c.end(), [](const SectionSet* x, const SectionSet* y) {
        return x->size() * y->cells() < y->size() * x->cells();
      });
  }

  /// Visits global sections in canonical order, optionally with some
  /// variables pinned; stops when `visit` returns false.
  template <class Visit>
  void run(const std::vector<std::optional<std::size_t>>& pinned, Visit&& visit) {
    if (a_.is_empty() || empty_facet_blocks_) return;
    stop_ = false;
    descend(0, pinned, visit);
  }

 private:
  bool admissible(VarId v) const {
    for (const SectionSet* set : checks_[v]) {
      const Product& p = set->product();
      std::size_t idx = 0;
      for (std::size_t i = 0; i < p.vars().size(); ++i) idx += values_[p.vars()[i]] * p.strides()[i];
      if (!set->contains_index(idx)) return false;
    }
    return true;
  }

  template <class Visit>
  void descend(VarId v, const std::vector<std::optional<std::size_t>>& pinned, Visit& visit) {
    if (stop_) return;
    if (v == scn_.num_vars()) {
      Section g{scn_.universe(), values_};
      if (!visit(g)) stop_ = true;
      return;
    }
    std::size_t lo = 0, hi = scn_.radix(v);
    if (pinned[v]) {
      lo = *pinned[v];
      hi = lo + 1;
    }
    for (std::size_t x = lo; x < hi && !stop_; ++x) {
      values_[v] = x;
      if (admissible(v)) descend(v + 1, pinned, visit);
    }
  }

  const PresheafModel& a_;
  const Scenario& scn_;
  std::vector<std::size_t> values_;
  std::vector<std::vector<const SectionSet*>> checks_;
  bool empty_facet_blocks_ = false;
  bool stop_ = false;
};

}  // namespace detail

/// The natural join ⋈_U A_U: all g over X with g|_U ∈ A_U for every member U,
/// in canonical order.
inline std::vector<Section> global_sections(const PresheafModel& a) {
  std::vector<Section> out;
  detail::Joiner j(a);
  j.run(std::vector<std::optional<std::size_t>>(a.scenario().num_vars()), [&](const Section& g) {
    out.push_back(g);
    return true;
  });
  return out;
}

/// Exhaustive filter of ∏_x D_x by every member constraint. Bounded by the
/// product limit; kept as an independent cross-check of the join.
inline std::vector<Section> global_sections_exhaustive(const PresheafModel& a) {
  const Scenario& s = a.scenario();
  Product all(s, s.universe());
  std::vector<std::vector<std::size_t>> maps;
  for (Context u : s.members()) maps.push_back(restriction_map(all, a.at(u).product()));
  std::vector<Section> out;
  for (std::size_t i = 0; i < all.size(); ++i) {
    bool ok = true;
    for (std::size_t m = 0; m < s.members().size() && ok; ++m) ok = a.sets()[m].contains_index(maps[m][i]);
    if (ok) out.push_back(Section{s.universe(), all.decode(i)});
  }
  return out;
}

/// First global section (canonical order) extending `s`, if any.
inline std::optional<Section> extend_section(const PresheafModel& a, const Section& s) {
  if (!a.scenario().contains(s.context))
    throw ScenarioError("context " + a.scenario().format(s.context) + " is not in the complex");
  if (!a.at(s.context).contains(s)) throw ModelError("section is not admitted by the model");
  std::vector<std::optional<std::size_t>> pinned(a.scenario().num_vars());
  auto vars = s.context.vars();
  for (std::size_t i = 0; i < vars.size(); ++i) pinned[vars[i]] = s.values[i];
  std::optional<Section> found;
  detail::Joiner j(a);
  j.run(pinned, [&](const Section& g) {
    found = g;
    return false;
  });
  return found;
}

struct ContextualityReport {
  std::vector<Section> global_sections;
  bool logically_contextual = false;
  bool strongly_contextual = false;
  bool empty_model = false;
  /// Per member context (canonical order): local sections with no global extension.
  std::vector<SectionSet> non_extending;
};

inline ContextualityReport contextuality(const PresheafModel& a) {
  const Scenario& s = a.scenario();
  ContextualityReport r;
  r.global_sections = global_sections(a);
  r.empty_model = a.is_empty();
  for (Context u : s.members()) {
    SectionSet reached(s, u);
    for (const Section& g : r.global_sections) reached.insert(restrict_section(g, u));
    SectionSet missing = a.at(u);
    missing.intersect_with(reached.complement());
    if (!missing.empty()) r.logically_contextual = true;
    r.non_extending.push_back(std::move(missing));
  }
  r.strongly_contextual = r.global_sections.empty() && !r.empty_model;
  return r;
}

inline bool is_logically_contextual(const PresheafModel& a) { return contextuality(a).logically_contextual; }

inline bool is_strongly_contextual(const PresheafModel& a) {
  return !a.is_empty() && global_sections(a).empty();
}

}  // namespace ctxkit

#endif  // CTXKIT_CONTEXTUALITY_HPP
