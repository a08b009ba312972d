#ifndef CTXKIT_SEMANTICS_HPP
#define CTXKIT_SEMANTICS_HPP

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ctxkit/error.hpp"
#include "ctxkit/logic.hpp"
#include "ctxkit/model.hpp"
#include "ctxkit/parser.hpp"
#include "ctxkit/section.hpp"

namespace ctxkit {

namespace detail {

struct Env {
  std::vector<std::size_t> vars;   // indexed by VarId
  std::vector<std::size_t> bound;  // indexed by binder slot
};

inline std::size_t eval_term(const TermNode& t, const Signature& sig, const Env& env) {
  switch (t.kind) {
    case TermKind::Variable:
      return env.vars[t.index];
    case TermKind::Bound:
      return env.bound[t.index];
    case TermKind::Constant:
      return t.index;
    case TermKind::Apply: {
      const FunctionSymbol& f = sig.functions()[t.index];
      std::size_t idx = 0;
      for (std::size_t i = 0; i < t.args.size(); ++i)
        idx = idx * sig.scenario().domains()[f.args[i]].size() + eval_term(*t.args[i], sig, env);
      return f.table[idx];
    }
    case TermKind::Add:
      return (eval_term(*t.args[0], sig, env) + eval_term(*t.args[1], sig, env)) % sig.scenario().domains()[t.sort].size();
    case TermKind::Xor:
      return eval_term(*t.args[0], sig, env) ^ eval_term(*t.args[1], sig, env);
  }
  return 0;
}

inline bool eval_formula(const Formula& f, const Signature& sig, Env& env) {
  switch (f.kind()) {
    case FormulaKind::Top:
      return true;
    case FormulaKind::Bot:
      return false;
    case FormulaKind::Equal:
      return eval_term(*f.terms()[0], sig, env) == eval_term(*f.terms()[1], sig, env);
    case FormulaKind::Less:
      return eval_term(*f.terms()[0], sig, env) < eval_term(*f.terms()[1], sig, env);
    case FormulaKind::Relation: {
      const RelationSymbol& r = sig.relations()[f.index()];
      std::size_t idx = 0;
      for (std::size_t i = 0; i < f.terms().size(); ++i)
        idx = idx * sig.scenario().domains()[r.args[i]].size() + eval_term(*f.terms()[i], sig, env);
      return r.holds[idx];
    }
    case FormulaKind::Not:
      return !eval_formula(f.children()[0], sig, env);
    case FormulaKind::And:
      return eval_formula(f.children()[0], sig, env) && eval_formula(f.children()[1], sig, env);
    case FormulaKind::Or:
      return eval_formula(f.children()[0], sig, env) || eval_formula(f.children()[1], sig, env);
    case FormulaKind::Exists: {
      if (env.bound.size() <= f.index()) env.bound.resize(f.index() + 1);
      std::size_t n = sig.scenario().domains()[f.sort()].size();
      for (std::size_t v = 0; v < n; ++v) {
        env.bound[f.index()] = v;
        if (eval_formula(f.children()[0], sig, env)) return true;
      }
      return false;
    }
  }
  return false;
}

}  // namespace detail

/// Truth of φ under a section whose context covers fv(φ).
inline bool holds(const Signature& sig, const Formula& f, const Section& s) {
  if (!f.free_vars().subset_of(s.context))
    throw LogicError("section context does not cover the formula's free variables");
  detail::Env env{std::vector<std::size_t>(sig.scenario().num_vars(), 0), {}};
  auto vars = s.context.vars();
  for (std::size_t i = 0; i < vars.size(); ++i) env.vars[vars[i]] = s.values[i];
  return detail::eval_formula(f, sig, env);
}

/// ⟦φ⟧_U: the sections over U that satisfy φ, by direct evaluation.
inline SectionSet denote(const Signature& sig, const Formula& f, Context u) {
  const Scenario& scn = sig.scenario();
  if (!f.free_vars().subset_of(u))
    throw LogicError("context " + scn.format(u) + " does not contain the free variables " + scn.format(f.free_vars()));
  // Evaluate on the free variables only, then pull back along restriction.
  Context fv = f.free_vars();
  SectionSet base(scn, fv);
  detail::Env env{std::vector<std::size_t>(scn.num_vars(), 0), {}};
  const Product& p = base.product();
  auto vars = p.vars();
  std::vector<std::size_t> digits(vars.size(), 0);
  for (std::size_t idx = 0; idx < p.size(); ++idx) {
    for (std::size_t i = 0; i < vars.size(); ++i) env.vars[vars[i]] = digits[i];
    if (detail::eval_formula(f, sig, env)) base.insert_index(idx);
    for (std::size_t i = vars.size(); i-- > 0;) {
      if (++digits[i] < p.radices()[i]) break;
      digits[i] = 0;
    }
  }
  return fv == u ? base : preimage(scn, base, u);
}

/// Within-context entailment: ⋂_{ψ∈Γ} ⟦ψ⟧_U ⊆ ⟦φ⟧_U.
inline bool global_entails(const Signature& sig, const std::vector<Formula>& premises, const Formula& goal, Context u) {
  SectionSet meet = SectionSet::full(sig.scenario(), u);
  for (const auto& p : premises) meet.intersect_with(denote(sig, p, u));
  return meet.subset_of(denote(sig, goal, u));
}

/// A ⊨_U φ, or, without a context, A ⊨_U φ for every member U ⊇ fv(φ).
inline bool satisfies(const PresheafModel& a, const Signature& sig, const Formula& f, std::optional<Context> u = std::nullopt) {
  const Scenario& scn = a.scenario();
  if (u) {
    if (!scn.contains(*u)) throw LogicError("context " + scn.format(*u) + " is not in the complex");
    return a.at(*u).subset_of(denote(sig, f, *u));
  }
  if (!in_fragment(f, scn.complex()))
    throw LogicError("formula over " + scn.format(f.free_vars()) + " is outside the contextual fragment");
  for (Context m : scn.members())
    if (f.free_vars().subset_of(m) && !a.at(m).subset_of(denote(sig, f, m))) return false;
  return true;
}

/// A set of formulas in the contextual fragment, with Γ_U = {φ : fv(φ) ⊆ U}.
class Theory {
 public:
  explicit Theory(SignaturePtr sig, std::vector<Formula> formulas = {}) : sig_(std::move(sig)), formulas_(std::move(formulas)) {
    for (std::size_t i = 0; i < formulas_.size(); ++i) check(formulas_[i], i);
  }

  const Signature& signature() const { return *sig_; }
  const SignaturePtr& signature_ptr() const { return sig_; }
  const Scenario& scenario() const { return sig_->scenario(); }
  const ScenarioPtr& scenario_ptr() const { return sig_->scenario_ptr(); }
  const std::vector<Formula>& formulas() const { return formulas_; }
  std::size_t size() const { return formulas_.size(); }
  const Formula& operator[](std::size_t i) const { return formulas_.at(i); }

  /// Indices of the formulas in Γ_U.
  std::vector<std::size_t> gamma_at(Context u) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < formulas_.size(); ++i)
      if (formulas_[i].free_vars().subset_of(u)) out.push_back(i);
    return out;
  }

  Theory with(Formula f) const {
    auto fs = formulas_;
    fs.push_back(std::move(f));
    return Theory(sig_, std::move(fs));
  }

 private:
  void check(const Formula& f, std::size_t i) const {
    if (!in_fragment(f, scenario().complex()))
      throw LogicError("formula " + std::to_string(i + 1) + " (" + to_string(f, scenario()) + ") is outside the contextual fragment: " +
                       scenario().format(f.free_vars()) + " is not a context");
  }

  SignaturePtr sig_;
  std::vector<Formula> formulas_;
};

inline Theory parse_theory(SignaturePtr sig, const std::vector<std::string>& texts, ParseOptions opts = {}) {
  std::vector<Formula> fs;
  for (const auto& t : texts) fs.push_back(parse_formula(t, *sig, opts));
  return Theory(std::move(sig), std::move(fs));
}

/// Renders a section set as a formula: `top`, `bot`, or a disjunction of
/// conjunctions of value-constant atoms, one disjunct per section.
inline Formula render_constraint(const Scenario& scn, const SectionSet& s) {
  if (s.is_full()) return Formula::top();
  if (s.empty()) return Formula::bot();
  std::optional<Formula> out;
  for (const Section& sec : s.sections()) {
    std::optional<Formula> clause;
    auto vars = sec.context.vars();
    for (std::size_t i = 0; i < vars.size(); ++i) {
      Formula atom = Formula::equal(term::variable(scn, vars[i]), term::constant(scn, scn.variables()[vars[i]].domain, sec.values[i]));
      clause = clause ? Formula::conj(*clause, atom) : atom;
    }
    out = out ? Formula::disj(*out, *clause) : *clause;
  }
  return *out;
}

}  // namespace ctxkit

#endif  // CTXKIT_SEMANTICS_HPP
