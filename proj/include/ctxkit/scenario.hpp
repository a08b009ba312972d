#ifndef CTXKIT_SCENARIO_HPP
#define CTXKIT_SCENARIO_HPP

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ctxkit/error.hpp"

namespace ctxkit {

using VarId = std::size_t;

inline constexpr std::size_t kMaxVariables = 64;

/// A finite set of variables, stored as a bitmask over declaration indices.
/// Iteration and every tuple built over a context follow declaration order.
class Context {
 public:
  constexpr Context() = default;
  constexpr explicit Context(std::uint64_t mask) : mask_(mask) {}

  static Context of(std::initializer_list<VarId> vars) {
    Context c;
    for (VarId v : vars) c = c.with(v);
    return c;
  }

  constexpr std::uint64_t mask() const { return mask_; }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(mask_)); }
  constexpr bool contains(VarId v) const { return v < kMaxVariables && ((mask_ >> v) & 1u) != 0; }
  constexpr bool subset_of(Context other) const { return (mask_ & ~other.mask_) == 0; }
  constexpr bool proper_subset_of(Context other) const { return subset_of(other) && mask_ != other.mask_; }

  Context with(VarId v) const {
    if (v >= kMaxVariables) throw ScenarioError("variable index out of range");
    return Context(mask_ | (std::uint64_t{1} << v));
  }
  constexpr Context without(VarId v) const { return Context(mask_ & ~(std::uint64_t{1} << v)); }
  constexpr Context operator|(Context o) const { return Context(mask_ | o.mask_); }
  constexpr Context operator&(Context o) const { return Context(mask_ & o.mask_); }
  constexpr Context minus(Context o) const { return Context(mask_ & ~o.mask_); }

  std::vector<VarId> vars() const {
    std::vector<VarId> out;
    out.reserve(size());
    for (std::uint64_t m = mask_; m != 0; m &= m - 1) out.push_back(static_cast<VarId>(std::countr_zero(m)));
    return out;
  }

  /// Position of `v` among the context's variables.
  std::size_t position_of(VarId v) const {
    std::uint64_t below = mask_ & ((std::uint64_t{1} << v) - 1);
    return static_cast<std::size_t>(std::popcount(below));
  }

  friend constexpr bool operator==(Context a, Context b) { return a.mask_ == b.mask_; }

 private:
  std::uint64_t mask_ = 0;
};

/// Canonical context order: by size, then lexicographically on the ascending
/// variable lists.
struct CanonicalLess {
  bool operator()(Context a, Context b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    std::uint64_t diff = a.mask() ^ b.mask();
    if (diff == 0) return false;
    std::uint64_t lowest = diff & (~diff + 1);
    return (a.mask() & lowest) != 0;
  }
};

struct ContextHash {
  std::size_t operator()(Context c) const { return std::hash<std::uint64_t>{}(c.mask()); }
};

/// Abstract simplicial complex on variables 0..n-1, stored by its facets.
class SimplicialComplex {
 public:
  SimplicialComplex() : SimplicialComplex(0, {}) {}

  /// Builds the complex generated by `facets`. Redundant facets (subsets of
  /// others, duplicates) are dropped; every variable must be covered.
  SimplicialComplex(std::size_t num_vars, std::vector<Context> facets) : num_vars_(num_vars) {
    if (num_vars > kMaxVariables) throw ScenarioError("at most 64 variables are supported");
    const std::uint64_t all = num_vars == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << num_vars) - 1);
    Context covered;
    for (Context f : facets) {
      if ((f.mask() & ~all) != 0) throw ScenarioError("facet refers to an unknown variable");
      covered = covered | f;
    }
    if (covered.mask() != all) {
      for (VarId v = 0; v < num_vars; ++v)
        if (!covered.contains(v))
          throw ScenarioError("variable #" + std::to_string(v) + " is not covered by any context");
    }
    std::sort(facets.begin(), facets.end(), CanonicalLess{});
    facets.erase(std::unique(facets.begin(), facets.end()), facets.end());
    for (Context f : facets) {
      bool redundant = std::any_of(facets.begin(), facets.end(),
                                   [&](Context g) { return f.proper_subset_of(g); });
      if (!redundant) facets_.push_back(f);
    }

    // Every facet contributes all of its faces, so wide facets are refused
    // before enumeration.
    std::size_t faces = 0;
    for (Context f : facets_) {
      if (f.size() >= 63 || (std::size_t{1} << f.size()) > product_limit() - std::min(faces, product_limit()))
        throw ResourceError("complex would have more than " + std::to_string(product_limit()) + " member contexts");
      faces += std::size_t{1} << f.size();
    }
    std::unordered_map<Context, std::size_t, ContextHash> seen;
    auto add = [&](Context c) {
      if (seen.emplace(c, 0).second) members_.push_back(c);
    };
    add(Context{});
    for (Context f : facets_) {
      // Enumerate all submasks of the facet.
      std::uint64_t m = f.mask();
      for (std::uint64_t s = m;; s = (s - 1) & m) {
        add(Context(s));
        if (s == 0) break;
      }
    }
    std::sort(members_.begin(), members_.end(), CanonicalLess{});
    for (std::size_t i = 0; i < members_.size(); ++i) index_.emplace(members_[i], i);

    for (Context v : members_) {
      for (VarId x : v.vars()) pairs_.emplace_back(v.without(x), v);
    }
  }

  std::size_t num_vars() const { return num_vars_; }
  const std::vector<Context>& facets() const { return facets_; }

  /// Every member context (the downward closure of the facets), canonical order.
  const std::vector<Context>& members() const { return members_; }

  bool contains(Context u) const { return index_.count(u) != 0; }

  std::optional<std::size_t> member_index(Context u) const {
    auto it = index_.find(u);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t index_of(Context u) const {
    auto it = index_.find(u);
    if (it == index_.end()) throw ScenarioError("context is not in the complex");
    return it->second;
  }

  /// All subsets of a member context, in canonical order.
  std::vector<Context> faces_of(Context u) const {
    if (!contains(u)) throw ScenarioError("context is not in the complex");
    std::vector<Context> out;
    std::uint64_t m = u.mask();
    for (std::uint64_t s = m;; s = (s - 1) & m) {
      out.emplace_back(s);
      if (s == 0) break;
    }
    std::sort(out.begin(), out.end(), CanonicalLess{});
    return out;
  }

  /// Pairs (U, V) of members with U ⊂ V and |V \ U| = 1, ordered by V then by
  /// the removed variable.
  const std::vector<std::pair<Context, Context>>& codim1_pairs() const { return pairs_; }

  friend bool operator==(const SimplicialComplex& a, const SimplicialComplex& b) {
    return a.num_vars_ == b.num_vars_ && a.facets_ == b.facets_;
  }

 private:
  std::size_t num_vars_ = 0;
  std::vector<Context> facets_;
  std::vector<Context> members_;
  std::unordered_map<Context, std::size_t, ContextHash> index_;
  std::vector<std::pair<Context, Context>> pairs_;
};

inline SimplicialComplex complex_from_facets(std::size_t num_vars, std::vector<Context> facets) {
  return SimplicialComplex(num_vars, std::move(facets));
}

struct Domain {
  std::string name;
  std::vector<std::string> values;
  bool ordered = true;

  std::size_t size() const { return values.size(); }

  std::optional<std::size_t> value_index(std::string_view v) const {
    for (std::size_t i = 0; i < values.size(); ++i)
      if (values[i] == v) return i;
    return std::nullopt;
  }

  friend bool operator==(const Domain&, const Domain&) = default;
};

struct Variable {
  std::string name;
  std::size_t domain = 0;

  friend bool operator==(const Variable&, const Variable&) = default;
};

/// Variables with finite domains together with the complex of measurement contexts.
/// Immutable after construction.
class Scenario {
 public:
  Scenario(std::string name, std::vector<Domain> domains, std::vector<Variable> variables,
           std::vector<Context> facets)
      : name_(std::move(name)), domains_(std::move(domains)), variables_(std::move(variables)) {
    for (const Domain& d : domains_) {
      if (d.values.empty()) throw ScenarioError("domain '" + d.name + "' has no values");
      for (std::size_t i = 0; i < d.values.size(); ++i)
        for (std::size_t j = i + 1; j < d.values.size(); ++j)
          if (d.values[i] == d.values[j])
            throw ScenarioError("domain '" + d.name + "' repeats value '" + d.values[i] + "'");
    }
    for (std::size_t i = 0; i < domains_.size(); ++i)
      for (std::size_t j = i + 1; j < domains_.size(); ++j)
        if (domains_[i].name == domains_[j].name)
          throw ScenarioError("domain '" + domains_[i].name + "' declared twice");
    for (std::size_t i = 0; i < variables_.size(); ++i) {
      if (variables_[i].domain >= domains_.size())
        throw ScenarioError("variable '" + variables_[i].name + "' has an unknown domain");
      for (std::size_t j = i + 1; j < variables_.size(); ++j)
        if (variables_[i].name == variables_[j].name)
          throw ScenarioError("variable '" + variables_[i].name + "' declared twice");
    }
    try {
      complex_ = SimplicialComplex(variables_.size(), std::move(facets));
    } catch (const ScenarioError& e) {
      std::string msg = e.what();
      // Replace the numeric placeholder with the variable's name where possible.
      auto pos = msg.find('#');
      if (pos != std::string::npos) {
        auto idx = std::stoul(msg.substr(pos + 1));
        if (idx < variables_.size()) msg = "variable '" + variables_[idx].name + "' is not covered by any context";
      }
      throw ScenarioError(msg);
    }
  }

  const std::string& name() const { return name_; }
  const std::vector<Domain>& domains() const { return domains_; }
  const std::vector<Variable>& variables() const { return variables_; }
  const SimplicialComplex& complex() const { return complex_; }
  const std::vector<Context>& facets() const { return complex_.facets(); }
  const std::vector<Context>& members() const { return complex_.members(); }

  std::size_t num_vars() const { return variables_.size(); }
  const Domain& domain_of(VarId v) const { return domains_.at(variables_.at(v).domain); }
  std::size_t radix(VarId v) const { return domain_of(v).size(); }

  Context universe() const {
    return Context(variables_.size() == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << variables_.size()) - 1));
  }

  bool contains(Context u) const { return complex_.contains(u); }
  std::size_t index_of(Context u) const { return complex_.index_of(u); }

  std::optional<VarId> find_var(std::string_view name) const {
    for (VarId v = 0; v < variables_.size(); ++v)
      if (variables_[v].name == name) return v;
    return std::nullopt;
  }

  std::optional<std::size_t> find_domain(std::string_view name) const {
    for (std::size_t d = 0; d < domains_.size(); ++d)
      if (domains_[d].name == name) return d;
    return std::nullopt;
  }

  VarId var(std::string_view name) const {
    if (auto v = find_var(name)) return *v;
    throw ScenarioError("unknown variable '" + std::string(name) + "'");
  }

  Context context(std::initializer_list<std::string_view> names) const {
    Context c;
    for (auto n : names) c = c.with(var(n));
    return c;
  }

  Context context(const std::vector<std::string>& names) const {
    Context c;
    for (const auto& n : names) c = c.with(var(n));
    return c;
  }

  std::vector<std::string> names_of(Context c) const {
    std::vector<std::string> out;
    for (VarId v : c.vars()) out.push_back(variables_.at(v).name);
    return out;
  }

  /// "{a1 b1}" rendering used in diagnostics and text reports.
  std::string format(Context c) const {
    std::string s = "{";
    bool first = true;
    for (VarId v : c.vars()) {
      if (!first) s += ' ';
      s += variables_.at(v).name;
      first = false;
    }
    return s + "}";
  }

  friend bool operator==(const Scenario& a, const Scenario& b) {
    return a.domains_ == b.domains_ && a.variables_ == b.variables_ && a.complex_ == b.complex_;
  }

 private:
  std::string name_;
  std::vector<Domain> domains_;
  std::vector<Variable> variables_;
  SimplicialComplex complex_;
};

using ScenarioPtr = std::shared_ptr<const Scenario>;

/// Builds a scenario from names; facets are given as lists of variable names.
inline ScenarioPtr make_scenario(std::string name, std::vector<Domain> domains,
                                 const std::vector<std::pair<std::string, std::string>>& vars,
                                 const std::vector<std::vector<std::string>>& facets) {
  std::vector<Variable> variables;
  for (const auto& [vname, dname] : vars) {
    std::optional<std::size_t> d;
    for (std::size_t i = 0; i < domains.size(); ++i)
      if (domains[i].name == dname) d = i;
    if (!d) throw ScenarioError("unknown domain '" + dname + "'");
    variables.push_back({vname, *d});
  }
  std::vector<Context> fs;
  for (const auto& f : facets) {
    Context c;
    for (const auto& n : f) {
      auto it = std::find_if(variables.begin(), variables.end(), [&](const Variable& v) { return v.name == n; });
      if (it == variables.end()) throw ScenarioError("unknown variable '" + n + "' in context");
      c = c.with(static_cast<VarId>(it - variables.begin()));
    }
    fs.push_back(c);
  }
  return std::make_shared<const Scenario>(std::move(name), std::move(domains), std::move(variables), std::move(fs));
}

inline Domain boolean_domain(std::string name = "B") { return Domain{std::move(name), {"0", "1"}, true}; }

inline Domain cyclic_domain(std::string name, std::size_t k) {
  Domain d{std::move(name), {}, true};
  for (std::size_t i = 0; i < k; ++i) d.values.push_back(std::to_string(i));
  return d;
}

}  // namespace ctxkit

#endif  // CTXKIT_SCENARIO_HPP
