#ifndef CTXKIT_LOGIC_HPP
#define CTXKIT_LOGIC_HPP

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctxkit/error.hpp"
#include "ctxkit/scenario.hpp"

namespace ctxkit {

/// A function symbol interpreted by a total lookup table over its argument
/// product (lexicographic, first argument most significant).
struct FunctionSymbol {
  std::string name;
  std::vector<std::size_t> args;  // domain indices
  std::size_t result = 0;
  std::vector<std::size_t> table;
};

struct RelationSymbol {
  std::string name;
  std::vector<std::size_t> args;
  std::vector<bool> holds;  // indexed like FunctionSymbol::table
};

/// Interpretation of the many-sorted language over a scenario: sorts are the
/// scenario's domains, every domain value is a constant, plus declared
/// function and relation tables. The builtins `+` (addition modulo the domain
/// size) and `(+)` (XOR on two-valued domains) need no declaration.
class Signature {
 public:
  explicit Signature(ScenarioPtr scn) : scn_(std::move(scn)) {}

  const Scenario& scenario() const { return *scn_; }
  const ScenarioPtr& scenario_ptr() const { return scn_; }
  const std::vector<FunctionSymbol>& functions() const { return functions_; }
  const std::vector<RelationSymbol>& relations() const { return relations_; }

  std::size_t add_function(std::string name, const std::vector<std::string>& arg_domains,
                           const std::string& result_domain, std::vector<std::size_t> table) {
    check_fresh(name);
    FunctionSymbol f{std::move(name), resolve(arg_domains), domain(result_domain), std::move(table)};
    if (f.table.size() != arity_cells(f.args))
      throw LogicError("function '" + f.name + "' table must have " + std::to_string(arity_cells(f.args)) + " entries");
    for (std::size_t v : f.table)
      if (v >= scn_->domains()[f.result].size()) throw LogicError("function '" + f.name + "' table value out of range");
    functions_.push_back(std::move(f));
    return functions_.size() - 1;
  }

  std::size_t add_relation(std::string name, const std::vector<std::string>& arg_domains,
                           const std::vector<std::vector<std::size_t>>& tuples) {
    check_fresh(name);
    RelationSymbol r{std::move(name), resolve(arg_domains), {}};
    r.holds.assign(arity_cells(r.args), false);
    for (const auto& t : tuples) {
      if (t.size() != r.args.size()) throw LogicError("relation '" + r.name + "' tuple has the wrong arity");
      r.holds[cell_of(r.args, t)] = true;
    }
    relations_.push_back(std::move(r));
    return relations_.size() - 1;
  }

  std::optional<std::size_t> find_function(std::string_view name) const {
    for (std::size_t i = 0; i < functions_.size(); ++i)
      if (functions_[i].name == name) return i;
    return std::nullopt;
  }

  std::optional<std::size_t> find_relation(std::string_view name) const {
    for (std::size_t i = 0; i < relations_.size(); ++i)
      if (relations_[i].name == name) return i;
    return std::nullopt;
  }

  std::size_t cell_of(const std::vector<std::size_t>& arg_domains, const std::vector<std::size_t>& values) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < arg_domains.size(); ++i) {
      std::size_t r = scn_->domains()[arg_domains[i]].size();
      if (values[i] >= r) throw LogicError("argument value out of range");
      idx = idx * r + values[i];
    }
    return idx;
  }

 private:
  std::size_t domain(const std::string& name) const {
    if (auto d = scn_->find_domain(name)) return *d;
    throw LogicError("unknown domain '" + name + "'");
  }
  std::vector<std::size_t> resolve(const std::vector<std::string>& names) const {
    std::vector<std::size_t> out;
    for (const auto& n : names) out.push_back(domain(n));
    return out;
  }
  std::size_t arity_cells(const std::vector<std::size_t>& args) const {
    std::size_t n = 1;
    for (std::size_t d : args) n *= scn_->domains()[d].size();
    return n;
  }
  void check_fresh(const std::string& name) const {
    if (find_function(name) || find_relation(name)) throw LogicError("symbol '" + name + "' declared twice");
    if (scn_->find_var(name)) throw LogicError("symbol '" + name + "' clashes with a variable");
  }

  ScenarioPtr scn_;
  std::vector<FunctionSymbol> functions_;
  std::vector<RelationSymbol> relations_;
};

using SignaturePtr = std::shared_ptr<const Signature>;

enum class TermKind { Variable, Bound, Constant, Apply, Add, Xor };

struct TermNode {
  TermKind kind;
  std::size_t sort;   // domain index
  std::size_t index;  // variable id, bound slot, value index or function id
  std::string name;   // printable name
  std::vector<std::shared_ptr<const TermNode>> args;
};

using Term = std::shared_ptr<const TermNode>;

namespace term {

inline Term variable(const Scenario& scn, VarId v) {
  return std::make_shared<const TermNode>(
      TermNode{TermKind::Variable, scn.variables().at(v).domain, v, scn.variables()[v].name, {}});
}

inline Term bound(std::string name, std::size_t slot, std::size_t sort) {
  return std::make_shared<const TermNode>(TermNode{TermKind::Bound, sort, slot, std::move(name), {}});
}

inline Term constant(const Scenario& scn, std::size_t domain, std::size_t value) {
  const Domain& d = scn.domains().at(domain);
  if (value >= d.size()) throw LogicError("constant out of range for domain '" + d.name + "'");
  return std::make_shared<const TermNode>(TermNode{TermKind::Constant, domain, value, d.values[value], {}});
}

inline Term add(Term a, Term b) {
  if (a->sort != b->sort) throw LogicError("'+' applied to terms of different sorts");
  std::size_t sort = a->sort;
  return std::make_shared<const TermNode>(TermNode{TermKind::Add, sort, 0, "+", {std::move(a), std::move(b)}});
}

inline Term exclusive_or(const Scenario& scn, Term a, Term b) {
  if (a->sort != b->sort) throw LogicError("'(+)' applied to terms of different sorts");
  if (scn.domains()[a->sort].size() != 2)
    throw LogicError("'(+)' needs a two-valued domain, not '" + scn.domains()[a->sort].name + "'");
  std::size_t sort = a->sort;
  return std::make_shared<const TermNode>(TermNode{TermKind::Xor, sort, 0, "(+)", {std::move(a), std::move(b)}});
}

inline Term apply(const Signature& sig, std::size_t fn, std::vector<Term> args) {
  const FunctionSymbol& f = sig.functions().at(fn);
  if (args.size() != f.args.size()) throw LogicError("function '" + f.name + "' applied to the wrong number of arguments");
  for (std::size_t i = 0; i < args.size(); ++i)
    if (args[i]->sort != f.args[i]) throw LogicError("argument " + std::to_string(i + 1) + " of '" + f.name + "' has the wrong sort");
  return std::make_shared<const TermNode>(TermNode{TermKind::Apply, f.result, fn, f.name, std::move(args)});
}

}  // namespace term

enum class FormulaKind { Top, Bot, Equal, Less, Relation, Not, And, Or, Exists };

struct FormulaNode;

/// Immutable, well-sorted formula of the contextual language. Cheap to copy.
class Formula {
 public:
  Formula() : Formula(top()) {}

  static Formula top();
  static Formula bot();
  static Formula equal(Term a, Term b);
  static Formula less(const Scenario& scn, Term a, Term b);
  static Formula relation(const Signature& sig, std::size_t rel, std::vector<Term> args);
  static Formula negate(Formula f);
  static Formula conj(Formula a, Formula b);
  static Formula disj(Formula a, Formula b);
  static Formula exists(std::string name, std::size_t slot, std::size_t sort, Formula body);

  FormulaKind kind() const;
  const std::vector<Term>& terms() const;
  const std::vector<Formula>& children() const;
  std::size_t index() const;  // relation id or bound slot
  std::size_t sort() const;   // bound sort
  const std::string& name() const;
  /// Free scenario variables.
  Context free_vars() const;

 private:
  explicit Formula(std::shared_ptr<const FormulaNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const FormulaNode> node_;
};

struct FormulaNode {
  FormulaKind kind;
  std::vector<Term> terms;
  std::vector<Formula> children;
  std::size_t index = 0;
  std::size_t sort = 0;
  std::string name;
  Context free;
};

namespace detail {

inline Context term_vars(const Term& t) {
  Context c;
  if (t->kind == TermKind::Variable) c = c.with(t->index);
  for (const auto& a : t->args) c = c | term_vars(a);
  return c;
}

}  // namespace detail

inline Formula Formula::top() {
  static const Formula t(std::make_shared<const FormulaNode>(FormulaNode{FormulaKind::Top, {}, {}, 0, 0, "", {}}));
  return t;
}
inline Formula Formula::bot() {
  static const Formula b(std::make_shared<const FormulaNode>(FormulaNode{FormulaKind::Bot, {}, {}, 0, 0, "", {}}));
  return b;
}
inline Formula Formula::equal(Term a, Term b) {
  if (a->sort != b->sort) throw LogicError("'=' between terms of different sorts");
  Context fv = detail::term_vars(a) | detail::term_vars(b);
  return Formula(std::make_shared<const FormulaNode>(
      FormulaNode{FormulaKind::Equal, {std::move(a), std::move(b)}, {}, 0, 0, "", fv}));
}
inline Formula Formula::less(const Scenario& scn, Term a, Term b) {
  if (a->sort != b->sort) throw LogicError("'<' between terms of different sorts");
  if (!scn.domains()[a->sort].ordered) throw LogicError("domain '" + scn.domains()[a->sort].name + "' is not ordered");
  Context fv = detail::term_vars(a) | detail::term_vars(b);
  return Formula(std::make_shared<const FormulaNode>(
      FormulaNode{FormulaKind::Less, {std::move(a), std::move(b)}, {}, 0, 0, "", fv}));
}
inline Formula Formula::relation(const Signature& sig, std::size_t rel, std::vector<Term> args) {
  const RelationSymbol& r = sig.relations().at(rel);
  if (args.size() != r.args.size()) throw LogicError("relation '" + r.name + "' applied to the wrong number of arguments");
  Context fv;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i]->sort != r.args[i]) throw LogicError("argument " + std::to_string(i + 1) + " of '" + r.name + "' has the wrong sort");
    fv = fv | detail::term_vars(args[i]);
  }
  return Formula(std::make_shared<const FormulaNode>(FormulaNode{FormulaKind::Relation, std::move(args), {}, rel, 0, r.name, fv}));
}
inline Formula Formula::negate(Formula f) {
  Context fv = f.free_vars();
  return Formula(std::make_shared<const FormulaNode>(FormulaNode{FormulaKind::Not, {}, {std::move(f)}, 0, 0, "", fv}));
}
inline Formula Formula::conj(Formula a, Formula b) {
  Context fv = a.free_vars() | b.free_vars();
  return Formula(std::make_shared<const FormulaNode>(FormulaNode{FormulaKind::And, {}, {std::move(a), std::move(b)}, 0, 0, "", fv}));
}
inline Formula Formula::disj(Formula a, Formula b) {
  Context fv = a.free_vars() | b.free_vars();
  return Formula(std::make_shared<const FormulaNode>(FormulaNode{FormulaKind::Or, {}, {std::move(a), std::move(b)}, 0, 0, "", fv}));
}
inline Formula Formula::exists(std::string name, std::size_t slot, std::size_t sort, Formula body) {
  Context fv = body.free_vars();
  return Formula(std::make_shared<const FormulaNode>(
      FormulaNode{FormulaKind::Exists, {}, {std::move(body)}, slot, sort, std::move(name), fv}));
}

inline FormulaKind Formula::kind() const { return node_->kind; }
inline const std::vector<Term>& Formula::terms() const { return node_->terms; }
inline const std::vector<Formula>& Formula::children() const { return node_->children; }
inline std::size_t Formula::index() const { return node_->index; }
inline std::size_t Formula::sort() const { return node_->sort; }
inline const std::string& Formula::name() const { return node_->name; }
inline Context Formula::free_vars() const { return node_->free; }

inline Context free_vars(const Formula& f) { return f.free_vars(); }

/// φ lies in the contextual fragment iff its free variables form a member context.
inline bool in_fragment(const Formula& f, const SimplicialComplex& cplx) { return cplx.contains(f.free_vars()); }

/// Regular logic: ⊤, ∧, ∃, equality and relation atoms only.
inline bool is_regular(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Top:
    case FormulaKind::Equal:
    case FormulaKind::Relation:
      return true;
    case FormulaKind::And:
    case FormulaKind::Exists:
      for (const auto& c : f.children())
        if (!is_regular(c)) return false;
      return true;
    default:
      return false;
  }
}

// Printing. Precedence: quantifier 0, \/ 1, /\ 2, ~ and atoms 3.

namespace detail {

inline void print_term(const Term& t, std::string& out, bool nested) {
  switch (t->kind) {
    case TermKind::Variable:
    case TermKind::Bound:
    case TermKind::Constant:
      out += t->name;
      return;
    case TermKind::Apply:
      out += t->name + "(";
      for (std::size_t i = 0; i < t->args.size(); ++i) {
        if (i) out += ", ";
        print_term(t->args[i], out, false);
      }
      out += ")";
      return;
    case TermKind::Add:
    case TermKind::Xor:
      if (nested) out += "(";
      print_term(t->args[0], out, false);
      out += t->kind == TermKind::Add ? " + " : " (+) ";
      print_term(t->args[1], out, true);
      if (nested) out += ")";
      return;
  }
}

inline int precedence(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Exists:
      return 0;
    case FormulaKind::Or:
      return 1;
    case FormulaKind::And:
      return 2;
    default:
      return 3;
  }
}

inline void print_formula(const Formula& f, const Scenario& scn, std::string& out) {
  auto child = [&](const Formula& c, int min_prec) {
    bool paren = precedence(c) < min_prec;
    if (paren) out += "(";
    print_formula(c, scn, out);
    if (paren) out += ")";
  };
  switch (f.kind()) {
    case FormulaKind::Top:
      out += "top";
      return;
    case FormulaKind::Bot:
      out += "bot";
      return;
    case FormulaKind::Equal:
    case FormulaKind::Less:
      // Boolean sugar: x = 1 over a two-valued domain prints as x.
      if (f.kind() == FormulaKind::Equal && f.terms()[0]->kind == TermKind::Variable &&
          f.terms()[1]->kind == TermKind::Constant && f.terms()[1]->index == 1 &&
          scn.domains()[f.terms()[1]->sort].size() == 2) {
        out += f.terms()[0]->name;
        return;
      }
      print_term(f.terms()[0], out, false);
      out += f.kind() == FormulaKind::Equal ? " = " : " < ";
      print_term(f.terms()[1], out, false);
      return;
    case FormulaKind::Relation:
      out += f.name() + "(";
      for (std::size_t i = 0; i < f.terms().size(); ++i) {
        if (i) out += ", ";
        print_term(f.terms()[i], out, false);
      }
      out += ")";
      return;
    case FormulaKind::Not:
      out += "~";
      child(f.children()[0], 3);
      return;
    case FormulaKind::And:
      child(f.children()[0], 2);
      out += " /\\ ";
      child(f.children()[1], 3);
      return;
    case FormulaKind::Or:
      child(f.children()[0], 1);
      out += " \\/ ";
      child(f.children()[1], 2);
      return;
    case FormulaKind::Exists:
      out += "exists " + f.name() + ":" + scn.domains().at(f.sort()).name + " . ";
      print_formula(f.children()[0], scn, out);
      return;
  }
}

}  // namespace detail

/// Renders a formula in the ASCII grammar accepted by parse_formula.
inline std::string to_string(const Formula& f, const Scenario& scn) {
  std::string out;
  detail::print_formula(f, scn, out);
  return out;
}

inline bool same_formula(const Formula& a, const Formula& b, const Scenario& scn) {
  return to_string(a, scn) == to_string(b, scn);
}

}  // namespace ctxkit

#endif  // CTXKIT_LOGIC_HPP
