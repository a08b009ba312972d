#ifndef CTXKIT_XOR_AVN_HPP
#define CTXKIT_XOR_AVN_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ctxkit/contextuality.hpp"
#include "ctxkit/error.hpp"
#include "ctxkit/logic.hpp"
#include "ctxkit/semantics.hpp"

namespace ctxkit {

/// ⊕_{x∈vars} x = rhs over two-valued variables (value index 1 counts as 1).
struct XorEquation {
  std::vector<VarId> vars;  // sorted, duplicate-free, nonempty
  bool rhs = false;
  std::optional<std::size_t> formula;  // index in the source theory

  friend bool operator==(const XorEquation& a, const XorEquation& b) { return a.vars == b.vars && a.rhs == b.rhs; }
};

struct XorExtraction {
  std::vector<XorEquation> equations;
  std::vector<std::size_t> skipped;  // theory indices that are not XOR atoms
};

namespace detail {

// Collects the parity of a ⊕/+ sum over a two-valued sort. Fails on anything else.
inline bool xor_sum(const Term& t, const Scenario& scn, std::vector<char>& parity, bool& constant) {
  switch (t->kind) {
    case TermKind::Variable:
      if (scn.radix(t->index) != 2) return false;
      parity[t->index] ^= 1;
      return true;
    case TermKind::Constant:
      constant ^= t->index == 1;
      return true;
    case TermKind::Xor:
    case TermKind::Add:
      if (scn.domains()[t->sort].size() != 2) return false;
      return xor_sum(t->args[0], scn, parity, constant) && xor_sum(t->args[1], scn, parity, constant);
    default:
      return false;
  }
}

}  // namespace detail

/// Reads an equation atom whose sides are XOR sums of two-valued variables
/// and constants. Returns nothing for other formulas and for atoms whose
/// variables all cancel.
inline std::optional<XorEquation> as_xor_equation(const Formula& f, const Scenario& scn) {
  if (f.kind() != FormulaKind::Equal) return std::nullopt;
  if (scn.domains()[f.terms()[0]->sort].size() != 2) return std::nullopt;
  std::vector<char> parity(scn.num_vars(), 0);
  bool rhs = false;
  if (!detail::xor_sum(f.terms()[0], scn, parity, rhs) || !detail::xor_sum(f.terms()[1], scn, parity, rhs))
    return std::nullopt;
  XorEquation eq;
  for (VarId v = 0; v < scn.num_vars(); ++v)
    if (parity[v]) eq.vars.push_back(v);
  if (eq.vars.empty()) return std::nullopt;
  eq.rhs = rhs;
  return eq;
}

inline XorExtraction extract_xor(const Theory& gamma) {
  XorExtraction out;
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    if (auto eq = as_xor_equation(gamma[i], gamma.scenario())) {
      eq->formula = i;
      out.equations.push_back(std::move(*eq));
    } else {
      out.skipped.push_back(i);
    }
  }
  return out;
}

/// A set of equations whose left-hand sides cancel while the right-hand
/// sides sum to 1.
struct AvnCertificate {
  std::vector<std::size_t> equations;  // indices into the system, ascending
};

/// Checks cancellation and odd parity of a proposed certificate.
inline bool verify(const AvnCertificate& cert, const std::vector<XorEquation>& system) {
  if (cert.equations.empty()) return false;
  std::vector<char> parity;
  bool rhs = false;
  for (std::size_t i : cert.equations) {
    if (i >= system.size()) return false;
    for (VarId v : system[i].vars) {
      if (v >= parity.size()) parity.resize(v + 1, 0);
      parity[v] ^= 1;
    }
    rhs ^= system[i].rhs;
  }
  return rhs && std::all_of(parity.begin(), parity.end(), [](char c) { return c == 0; });
}

/// Gaussian elimination over GF(2), tracking which original rows combine into
/// each reduced row. Pivots are taken from the lowest-index remaining row.
inline std::optional<AvnCertificate> avn_certificate(const std::vector<XorEquation>& system) {
  std::size_t nvars = 0;
  for (const auto& e : system)
    for (VarId v : e.vars) nvars = std::max<std::size_t>(nvars, v + 1);
  const std::size_t n = system.size();
  const std::size_t width = nvars + 1 + n;  // coefficients | rhs | identity block
  std::vector<std::vector<std::uint64_t>> rows(n, std::vector<std::uint64_t>((width + 63) / 64, 0));
  auto flip = [](std::vector<std::uint64_t>& r, std::size_t bit) { r[bit / 64] ^= std::uint64_t{1} << (bit % 64); };
  auto test = [](const std::vector<std::uint64_t>& r, std::size_t bit) { return ((r[bit / 64] >> (bit % 64)) & 1u) != 0; };
  for (std::size_t i = 0; i < n; ++i) {
    for (VarId v : system[i].vars) flip(rows[i], v);
    if (system[i].rhs) flip(rows[i], nvars);
    flip(rows[i], nvars + 1 + i);
  }
  std::vector<char> used(n, 0);
  for (std::size_t col = 0; col < nvars; ++col) {
    std::optional<std::size_t> pivot;
    for (std::size_t i = 0; i < n && !pivot; ++i)
      if (!used[i] && test(rows[i], col)) pivot = i;
    if (!pivot) continue;
    used[*pivot] = 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == *pivot || !test(rows[i], col)) continue;
      for (std::size_t w = 0; w < rows[i].size(); ++w) rows[i][w] ^= rows[*pivot][w];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (used[i]) continue;
    bool zero = true;
    for (std::size_t c = 0; c < nvars && zero; ++c) zero = !test(rows[i], c);
    if (!zero || !test(rows[i], nvars)) continue;
    AvnCertificate cert;
    for (std::size_t j = 0; j < n; ++j)
      if (test(rows[i], nvars + 1 + j)) cert.equations.push_back(j);
    if (!verify(cert, system)) throw LogicError("internal: GF(2) certificate failed verification");
    return cert;
  }
  return std::nullopt;
}

/// Renders "x (+) y (+) ... = b" for an equation.
inline std::string render_equation(const Scenario& scn, const XorEquation& e) {
  std::string s;
  for (std::size_t i = 0; i < e.vars.size(); ++i) s += (i ? " (+) " : "") + scn.variables()[e.vars[i]].name;
  return s + " = " + (e.rhs ? "1" : "0");
}

struct ConsistencyResult {
  bool consistent = false;
  std::optional<Section> witness;  // first satisfying global assignment
};

/// Brute-force search of ∏_{x∈X} D_x for an assignment satisfying every
/// formula of Γ. Bounded by the product limit.
inline ConsistencyResult global_consistency(const Theory& gamma) {
  const Scenario& scn = gamma.scenario();
  Product all(scn, scn.universe());
  for (std::size_t idx = 0; idx < all.size(); ++idx) {
    Section g{scn.universe(), all.decode(idx)};
    bool ok = true;
    for (const Formula& f : gamma.formulas()) {
      if (!holds(gamma.signature(), f, g)) {
        ok = false;
        break;
      }
    }
    if (ok) return {true, g};
  }
  return {false, std::nullopt};
}

}  // namespace ctxkit

#endif  // CTXKIT_XOR_AVN_HPP
