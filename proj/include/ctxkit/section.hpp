#ifndef CTXKIT_SECTION_HPP
#define CTXKIT_SECTION_HPP

#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctxkit/error.hpp"
#include "ctxkit/scenario.hpp"

namespace ctxkit {

/// An assignment of value indices to the variables of a context, in
/// declaration order.
struct Section {
  Context context;
  std::vector<std::size_t> values;

  std::size_t value_of(VarId v) const {
    if (!context.contains(v)) throw ModelError("variable not in the section's context");
    return values[context.position_of(v)];
  }

  friend bool operator==(const Section&, const Section&) = default;
  friend bool operator<(const Section& a, const Section& b) {
    if (!(a.context == b.context)) return CanonicalLess{}(a.context, b.context);
    return a.values < b.values;
  }
};

inline Section restrict_section(const Section& s, Context u) {
  if (!u.subset_of(s.context)) throw ModelError("restriction target is not a subset of the section's context");
  Section out{u, {}};
  out.values.reserve(u.size());
  for (VarId v : u.vars()) out.values.push_back(s.values[s.context.position_of(v)]);
  return out;
}

/// Mixed-radix enumeration of ∏_{x∈U} D_x, lexicographic with the first
/// variable most significant.
class Product {
 public:
  Product() = default;
  Product(const Scenario& scn, Context ctx) : ctx_(ctx), vars_(ctx.vars()) {
    radices_.reserve(vars_.size());
    size_ = 1;
    for (VarId v : vars_) {
      std::size_t r = scn.radix(v);
      radices_.push_back(r);
      if (size_ > product_limit() / r)
        throw ResourceError("product over " + scn.format(ctx) + " exceeds the limit of " +
                            std::to_string(product_limit()) + " cells");
      size_ *= r;
    }
    if (size_ > product_limit())
      throw ResourceError("product over " + scn.format(ctx) + " exceeds the limit of " +
                          std::to_string(product_limit()) + " cells");
    strides_.assign(vars_.size(), 1);
    for (std::size_t i = vars_.size(); i-- > 1;) strides_[i - 1] = strides_[i] * radices_[i];
  }

  Context context() const { return ctx_; }
  const std::vector<VarId>& vars() const { return vars_; }
  const std::vector<std::size_t>& radices() const { return radices_; }
  const std::vector<std::size_t>& strides() const { return strides_; }
  std::size_t size() const { return size_; }

  std::size_t index(const std::vector<std::size_t>& values) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < vars_.size(); ++i) idx += values[i] * strides_[i];
    return idx;
  }

  std::vector<std::size_t> decode(std::size_t idx) const {
    std::vector<std::size_t> out(vars_.size());
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      out[i] = idx / strides_[i];
      idx %= strides_[i];
    }
    return out;
  }

  friend bool operator==(const Product& a, const Product& b) {
    return a.ctx_ == b.ctx_ && a.radices_ == b.radices_;
  }

 private:
  Context ctx_;
  std::vector<VarId> vars_;
  std::vector<std::size_t> radices_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 1;
};

/// For each cell of ∏_V, the index of its restriction in ∏_U (U ⊆ V).
inline std::vector<std::size_t> restriction_map(const Product& from, const Product& to) {
  if (!to.context().subset_of(from.context())) throw ModelError("restriction target is not a subset");
  std::vector<std::size_t> to_stride_of(from.vars().size(), 0);
  for (std::size_t i = 0; i < from.vars().size(); ++i) {
    VarId v = from.vars()[i];
    if (to.context().contains(v)) to_stride_of[i] = to.strides()[to.context().position_of(v)];
  }
  std::vector<std::size_t> out(from.size());
  std::vector<std::size_t> digits(from.vars().size(), 0);
  std::size_t target = 0;
  for (std::size_t idx = 0; idx < from.size(); ++idx) {
    out[idx] = target;
    // Odometer increment, updating the target index incrementally.
    for (std::size_t i = from.vars().size(); i-- > 0;) {
      if (++digits[i] < from.radices()[i]) {
        target += to_stride_of[i];
        break;
      }
      target -= to_stride_of[i] * (digits[i] - 1);
      digits[i] = 0;
    }
  }
  return out;
}

/// Dense subset of the finite product over one context.
class SectionSet {
 public:
  SectionSet() = default;
  SectionSet(const Scenario& scn, Context ctx) : product_(scn, ctx), words_((product_.size() + 63) / 64, 0) {}

  static SectionSet full(const Scenario& scn, Context ctx) {
    SectionSet s(scn, ctx);
    for (std::size_t i = 0; i < s.cells(); ++i) s.insert_index(i);
    return s;
  }

  static SectionSet from_indices(const Scenario& scn, Context ctx, const std::vector<std::size_t>& idx) {
    SectionSet s(scn, ctx);
    for (std::size_t i : idx) s.insert_index(i);
    return s;
  }

  Context context() const { return product_.context(); }
  const Product& product() const { return product_; }
  std::size_t cells() const { return product_.size(); }

  bool contains_index(std::size_t i) const { return ((words_[i / 64] >> (i % 64)) & 1u) != 0; }
  void insert_index(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  void erase_index(std::size_t i) { words_[i / 64] &= ~(std::uint64_t{1} << (i % 64)); }

  bool contains(const Section& s) const {
    if (!(s.context == context())) return false;
    for (std::size_t i = 0; i < s.values.size(); ++i)
      if (s.values[i] >= product_.radices()[i]) return false;
    return contains_index(product_.index(s.values));
  }

  void insert(const Section& s) {
    if (!(s.context == context())) throw ModelError("section over the wrong context");
    for (std::size_t i = 0; i < s.values.size(); ++i)
      if (s.values[i] >= product_.radices()[i]) throw ModelError("value index out of range");
    insert_index(product_.index(s.values));
  }

  Section section_at(std::size_t idx) const { return Section{context(), product_.decode(idx)}; }

  std::size_t size() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }
  bool empty() const {
    for (auto w : words_)
      if (w != 0) return false;
    return true;
  }
  bool is_full() const { return size() == cells(); }

  std::vector<std::size_t> indices() const {
    std::vector<std::size_t> out;
    for (std::size_t w = 0; w < words_.size(); ++w)
      for (std::uint64_t m = words_[w]; m != 0; m &= m - 1)
        out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(m)));
    return out;
  }

  std::vector<Section> sections() const {
    std::vector<Section> out;
    for (std::size_t i : indices()) out.push_back(section_at(i));
    return out;
  }

  bool subset_of(const SectionSet& o) const {
    check_same(o);
    for (std::size_t w = 0; w < words_.size(); ++w)
      if ((words_[w] & ~o.words_[w]) != 0) return false;
    return true;
  }

  /// In-place intersection; returns true if anything was removed.
  bool intersect_with(const SectionSet& o) {
    check_same(o);
    bool changed = false;
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t n = words_[w] & o.words_[w];
      changed |= n != words_[w];
      words_[w] = n;
    }
    return changed;
  }

  void unite_with(const SectionSet& o) {
    check_same(o);
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= o.words_[w];
  }

  SectionSet complement() const {
    SectionSet out = *this;
    for (std::size_t i = 0; i < cells(); ++i) {
      if (contains_index(i)) out.erase_index(i);
      else out.insert_index(i);
    }
    return out;
  }

  friend bool operator==(const SectionSet& a, const SectionSet& b) {
    return a.product_ == b.product_ && a.words_ == b.words_;
  }

 private:
  void check_same(const SectionSet& o) const {
    if (!(product_ == o.product_)) throw ModelError("section sets over different contexts");
  }

  Product product_;
  std::vector<std::uint64_t> words_;
};

inline SectionSet intersection(SectionSet a, const SectionSet& b) {
  a.intersect_with(b);
  return a;
}

/// Restriction image ∃(S) of a section set over V into U ⊆ V.
inline SectionSet image(const Scenario& scn, const SectionSet& s, Context u) {
  SectionSet out(scn, u);
  auto map = restriction_map(s.product(), out.product());
  for (std::size_t i : s.indices()) out.insert_index(map[i]);
  return out;
}

/// Preimage F⁻¹(S) of a section set over U under restriction from V ⊇ U.
inline SectionSet preimage(const Scenario& scn, const SectionSet& s, Context v) {
  SectionSet out(scn, v);
  auto map = restriction_map(out.product(), s.product());
  for (std::size_t i = 0; i < out.cells(); ++i)
    if (s.contains_index(map[i])) out.insert_index(i);
  return out;
}

/// Transports a section set to another context related by inclusion.
inline SectionSet transport(const Scenario& scn, const SectionSet& s, Context target) {
  if (s.context() == target) return s;
  if (target.subset_of(s.context())) return image(scn, s, target);
  if (s.context().subset_of(target)) return preimage(scn, s, target);
  throw ModelError("contexts " + scn.format(s.context()) + " and " + scn.format(target) + " are not nested");
}

/// Width in decimal digits of a variable's value indices.
inline std::size_t digit_width(const Scenario& scn, VarId v) {
  std::size_t max = scn.radix(v) - 1;
  std::size_t w = 1;
  while (max >= 10) {
    max /= 10;
    ++w;
  }
  return w;
}

/// Fixed-width digit string of a section's value indices, in canonical order.
inline std::string section_string(const Scenario& scn, const Section& s) {
  std::string out;
  auto vars = s.context.vars();
  for (std::size_t i = 0; i < vars.size(); ++i) {
    std::string d = std::to_string(s.values[i]);
    out += std::string(digit_width(scn, vars[i]) - d.size(), '0') + d;
  }
  return out;
}

/// Parses a digit string produced by section_string; throws ScenarioError on mismatch.
inline Section parse_section_string(const Scenario& scn, Context ctx, std::string_view text) {
  Section s{ctx, {}};
  std::size_t pos = 0;
  for (VarId v : ctx.vars()) {
    std::size_t w = digit_width(scn, v);
    if (pos + w > text.size())
      throw ScenarioError("section '" + std::string(text) + "' is too short for context " + scn.format(ctx));
    std::size_t value = 0;
    for (std::size_t i = 0; i < w; ++i) {
      char c = text[pos + i];
      if (c < '0' || c > '9') throw ScenarioError("section '" + std::string(text) + "' has a non-digit");
      value = value * 10 + static_cast<std::size_t>(c - '0');
    }
    if (value >= scn.radix(v))
      throw ScenarioError("section '" + std::string(text) + "' has value " + std::to_string(value) +
                          " outside the domain of '" + scn.variables()[v].name + "'");
    s.values.push_back(value);
    pos += w;
  }
  if (pos != text.size())
    throw ScenarioError("section '" + std::string(text) + "' is too long for context " + scn.format(ctx));
  return s;
}

inline std::vector<std::string> section_strings(const Scenario& scn, const SectionSet& set) {
  std::vector<std::string> out;
  for (const auto& s : set.sections()) out.push_back(section_string(scn, s));
  return out;
}

inline SectionSet section_set_from_strings(const Scenario& scn, Context ctx,
                                           const std::vector<std::string>& strings) {
  SectionSet s(scn, ctx);
  for (const auto& t : strings) s.insert(parse_section_string(scn, ctx, t));
  return s;
}

}  // namespace ctxkit

#endif  // CTXKIT_SECTION_HPP
