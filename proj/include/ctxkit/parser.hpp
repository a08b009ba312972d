#ifndef CTXKIT_PARSER_HPP
#define CTXKIT_PARSER_HPP

#include <cctype>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctxkit/error.hpp"
#include "ctxkit/logic.hpp"

namespace ctxkit {

struct ParseOptions {
  /// Reject ~, \/, bot, < and > (regular logic only).
  bool regular_only = false;
};

namespace detail {

enum class Tok { Name, LParen, RParen, Xor, Plus, Not, And, Or, Eq, Lt, Gt, Comma, Colon, Dot, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t offset;
};

/// Line and column (both 1-based) of a byte offset.
inline std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline bool name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

inline std::vector<Token> lex_formula(std::string_view src, std::size_t base_line, std::size_t base_col) {
  auto fail = [&](const std::string& msg, std::size_t off) -> ParseError {
    auto [l, c] = line_col(src, off);
    return ParseError(msg, l + base_line - 1, l == 1 ? c + base_col - 1 : c);
  };
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (src.substr(i, 3) == "(+)") {
      out.push_back({Tok::Xor, "(+)", start});
      i += 3;
    } else if (src.substr(i, 2) == "/\\") {
      out.push_back({Tok::And, "/\\", start});
      i += 2;
    } else if (src.substr(i, 2) == "\\/") {
      out.push_back({Tok::Or, "\\/", start});
      i += 2;
    } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      while (i < src.size() && name_char(src[i])) ++i;
      out.push_back({Tok::Name, std::string(src.substr(start, i - start)), start});
    } else {
      Tok k;
      switch (c) {
        case '(': k = Tok::LParen; break;
        case ')': k = Tok::RParen; break;
        case '+': k = Tok::Plus; break;
        case '~': k = Tok::Not; break;
        case '=': k = Tok::Eq; break;
        case '<': k = Tok::Lt; break;
        case '>': k = Tok::Gt; break;
        case ',': k = Tok::Comma; break;
        case ':': k = Tok::Colon; break;
        case '.': k = Tok::Dot; break;
        default:
          throw fail(std::string("unexpected character '") + c + "'", start);
      }
      out.push_back({k, std::string(1, c), start});
      ++i;
    }
  }
  out.push_back({Tok::End, "", src.size()});
  return out;
}

// Untyped term tree; sorts are resolved after the whole atom is read so that
// value constants can take their sort from the other side of a comparison.
struct RawTerm {
  enum Kind { Name, Apply, Add, Xor } kind;
  std::string name;
  std::size_t offset;
  std::vector<RawTerm> args;
};

class FormulaParser {
 public:
  FormulaParser(std::string_view src, const Signature& sig, ParseOptions opts, std::size_t base_line, std::size_t base_col)
      : src_(src), sig_(sig), scn_(sig.scenario()), opts_(opts), base_line_(base_line), base_col_(base_col),
        toks_(lex_formula(src, base_line, base_col)) {}

  Formula parse() {
    Formula f = formula();
    if (peek().kind != Tok::End) throw error("unexpected '" + peek().text + "'", peek().offset);
    return f;
  }

 private:
  struct Binder {
    std::string name;
    std::size_t sort;
  };

  ParseError error(const std::string& msg, std::size_t off) const {
    auto [l, c] = line_col(src_, off);
    return ParseError(msg, l + base_line_ - 1, l == 1 ? c + base_col_ - 1 : c);
  }

  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++pos_;
    return true;
  }
  const Token& expect(Tok k, const char* what) {
    if (peek().kind != k)
      throw error(std::string("expected ") + what + (peek().kind == Tok::End ? " at end of input" : ", found '" + peek().text + "'"),
                  peek().offset);
    return next();
  }

  void forbid(const char* what, std::size_t off) const {
    if (opts_.regular_only) throw error(std::string("'") + what + "' is not allowed in regular logic", off);
  }

  Formula formula() {
    if (peek().kind == Tok::Name && peek().text == "exists") return quantifier();
    return disjunction();
  }

  Formula quantifier() {
    next();
    const Token& var = expect(Tok::Name, "a bound variable name");
    if (scn_.find_var(var.text))
      throw error("bound variable '" + var.text + "' clashes with a scenario variable", var.offset);
    expect(Tok::Colon, "':'");
    const Token& dom = expect(Tok::Name, "a domain name");
    auto d = scn_.find_domain(dom.text);
    if (!d) throw error("unknown domain '" + dom.text + "'", dom.offset);
    expect(Tok::Dot, "'.'");
    binders_.push_back({var.text, *d});
    Formula body = formula();
    binders_.pop_back();
    return Formula::exists(var.text, binders_.size(), *d, std::move(body));
  }

  Formula disjunction() {
    Formula f = conjunction();
    while (peek().kind == Tok::Or) {
      forbid("\\/", peek().offset);
      next();
      Formula rhs = peek().kind == Tok::Name && peek().text == "exists" ? quantifier() : conjunction();
      f = Formula::disj(std::move(f), std::move(rhs));
    }
    return f;
  }

  Formula conjunction() {
    Formula f = unary();
    while (accept(Tok::And)) {
      Formula rhs = peek().kind == Tok::Name && peek().text == "exists" ? quantifier() : unary();
      f = Formula::conj(std::move(f), std::move(rhs));
    }
    return f;
  }

  Formula unary() {
    if (peek().kind == Tok::Not) {
      forbid("~", peek().offset);
      next();
      if (peek().kind == Tok::Name && peek().text == "exists") return Formula::negate(quantifier());
      return Formula::negate(unary());
    }
    return primary();
  }

  Formula primary() {
    const Token& t = peek();
    if (t.kind == Tok::Name && t.text == "top" && !is_symbol(t.text)) {
      next();
      return Formula::top();
    }
    if (t.kind == Tok::Name && t.text == "bot" && !is_symbol(t.text)) {
      forbid("bot", t.offset);
      next();
      return Formula::bot();
    }
    if (t.kind == Tok::Name && t.text == "exists") return quantifier();
    if (t.kind == Tok::LParen) {
      // Either a parenthesised formula or the start of a term; try the
      // formula reading first and fall back if a comparison follows.
      std::size_t save = pos_, depth = binders_.size();
      try {
        next();
        Formula f = formula();
        expect(Tok::RParen, "')'");
        Tok k = peek().kind;
        if (k != Tok::Eq && k != Tok::Lt && k != Tok::Gt && k != Tok::Plus && k != Tok::Xor) return f;
      } catch (const Error&) {
      }
      pos_ = save;
      binders_.resize(depth);
    }
    return atom();
  }

  bool is_symbol(const std::string& name) const {
    return scn_.find_var(name) || sig_.find_function(name) || sig_.find_relation(name) || bound_index(name);
  }

  Formula atom() {
    std::size_t off = peek().offset;
    if (peek().kind == Tok::Name && peek(1).kind == Tok::LParen) {
      if (auto rel = sig_.find_relation(peek().text)) {
        next();
        next();
        std::vector<RawTerm> raw;
        if (peek().kind != Tok::RParen) {
          raw.push_back(term());
          while (accept(Tok::Comma)) raw.push_back(term());
        }
        expect(Tok::RParen, "')'");
        const RelationSymbol& r = sig_.relations()[*rel];
        if (raw.size() != r.args.size())
          throw error("relation '" + r.name + "' expects " + std::to_string(r.args.size()) + " arguments", off);
        std::vector<Term> args;
        for (std::size_t i = 0; i < raw.size(); ++i) args.push_back(elaborate(raw[i], r.args[i]));
        return Formula::relation(sig_, *rel, std::move(args));
      }
    }
    RawTerm lhs = term();
    Tok op = peek().kind;
    if (op != Tok::Eq && op != Tok::Lt && op != Tok::Gt) {
      // Boolean sugar: a bare two-valued term t abbreviates t = 1.
      auto sort = infer(lhs);
      if (!sort) throw error("cannot determine the sort of '" + show(lhs) + "'", lhs.offset);
      if (scn_.domains()[*sort].size() != 2)
        throw error("'" + show(lhs) + "' is not a formula; expected '=', '<' or '>'", peek().offset);
      Term t = elaborate(lhs, *sort);
      return Formula::equal(std::move(t), term::constant(scn_, *sort, 1));
    }
    std::size_t op_off = next().offset;
    if (op != Tok::Eq) forbid(op == Tok::Lt ? "<" : ">", op_off);
    RawTerm rhs = term();
    auto ls = infer(lhs), rs = infer(rhs);
    std::optional<std::size_t> sort = ls ? ls : rs;
    if (ls && rs && *ls != *rs)
      throw error("sort mismatch: '" + show(lhs) + "' has sort " + scn_.domains()[*ls].name + " but '" + show(rhs) +
                      "' has sort " + scn_.domains()[*rs].name,
                  op_off);
    if (!sort) sort = constant_sort(lhs, rhs);
    Term a = elaborate(lhs, *sort), b = elaborate(rhs, *sort);
    try {
      if (op == Tok::Eq) return Formula::equal(std::move(a), std::move(b));
      if (op == Tok::Lt) return Formula::less(scn_, std::move(a), std::move(b));
      return Formula::less(scn_, std::move(b), std::move(a));
    } catch (const LogicError& e) {
      throw error(e.what(), op_off);
    }
  }

  RawTerm term() {
    RawTerm t = simple_term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Xor) {
      const Token& op = next();
      RawTerm rhs = simple_term();
      RawTerm sum{op.kind == Tok::Plus ? RawTerm::Add : RawTerm::Xor, op.text, op.offset, {std::move(t), std::move(rhs)}};
      t = std::move(sum);
    }
    return t;
  }

  RawTerm simple_term() {
    if (accept(Tok::LParen)) {
      RawTerm t = term();
      expect(Tok::RParen, "')'");
      return t;
    }
    const Token& name = expect(Tok::Name, "a term");
    RawTerm t{RawTerm::Name, name.text, name.offset, {}};
    if (peek().kind == Tok::LParen && sig_.find_function(name.text)) {
      next();
      t.kind = RawTerm::Apply;
      if (peek().kind != Tok::RParen) {
        t.args.push_back(term());
        while (accept(Tok::Comma)) t.args.push_back(term());
      }
      expect(Tok::RParen, "')'");
    }
    return t;
  }

  std::optional<std::size_t> bound_index(const std::string& name) const {
    for (std::size_t i = binders_.size(); i-- > 0;)
      if (binders_[i].name == name) return i;
    return std::nullopt;
  }

  std::optional<std::size_t> infer(const RawTerm& t) const {
    switch (t.kind) {
      case RawTerm::Name:
        if (auto b = bound_index(t.name)) return binders_[*b].sort;
        if (auto v = scn_.find_var(t.name)) return scn_.variables()[*v].domain;
        return std::nullopt;
      case RawTerm::Apply:
        return sig_.functions()[*sig_.find_function(t.name)].result;
      case RawTerm::Add:
      case RawTerm::Xor: {
        auto a = infer(t.args[0]);
        return a ? a : infer(t.args[1]);
      }
    }
    return std::nullopt;
  }

  // Both sides consist of constants only: pick the first domain holding all of them.
  std::size_t constant_sort(const RawTerm& a, const RawTerm& b) const {
    std::vector<std::string> names;
    collect_names(a, names);
    collect_names(b, names);
    for (std::size_t d = 0; d < scn_.domains().size(); ++d) {
      bool all = true;
      for (const auto& n : names) all = all && scn_.domains()[d].value_index(n).has_value();
      if (all) return d;
    }
    throw error("no domain contains all of the constants in this atom", a.offset);
  }

  static void collect_names(const RawTerm& t, std::vector<std::string>& out) {
    if (t.kind == RawTerm::Name) out.push_back(t.name);
    for (const auto& a : t.args) collect_names(a, out);
  }

  Term elaborate(const RawTerm& t, std::size_t sort) const {
    Term out;
    switch (t.kind) {
      case RawTerm::Name:
        if (auto b = bound_index(t.name)) {
          out = term::bound(t.name, *b, binders_[*b].sort);
        } else if (auto v = scn_.find_var(t.name)) {
          out = term::variable(scn_, *v);
        } else if (auto val = scn_.domains()[sort].value_index(t.name)) {
          return term::constant(scn_, sort, *val);
        } else {
          if (sig_.find_function(t.name)) throw error("function '" + t.name + "' needs arguments", t.offset);
          bool is_value = false;
          for (const auto& d : scn_.domains()) is_value = is_value || d.value_index(t.name).has_value();
          if (is_value)
            throw error("'" + t.name + "' is not a value of domain " + scn_.domains()[sort].name, t.offset);
          throw error("unknown symbol '" + t.name + "'", t.offset);
        }
        break;
      case RawTerm::Apply: {
        std::size_t fn = *sig_.find_function(t.name);
        const FunctionSymbol& f = sig_.functions()[fn];
        if (t.args.size() != f.args.size())
          throw error("function '" + f.name + "' expects " + std::to_string(f.args.size()) + " arguments", t.offset);
        std::vector<Term> args;
        for (std::size_t i = 0; i < t.args.size(); ++i) args.push_back(elaborate(t.args[i], f.args[i]));
        out = term::apply(sig_, fn, std::move(args));
        break;
      }
      case RawTerm::Add:
      case RawTerm::Xor: {
        Term a = elaborate(t.args[0], sort), b = elaborate(t.args[1], sort);
        try {
          out = t.kind == RawTerm::Add ? term::add(a, b) : term::exclusive_or(scn_, a, b);
        } catch (const LogicError& e) {
          throw error(e.what(), t.offset);
        }
        break;
      }
    }
    if (out->sort != sort)
      throw error("'" + show(t) + "' has sort " + scn_.domains()[out->sort].name + ", expected " + scn_.domains()[sort].name,
                  t.offset);
    return out;
  }

  static std::string show(const RawTerm& t) {
    switch (t.kind) {
      case RawTerm::Name:
        return t.name;
      case RawTerm::Apply: {
        std::string s = t.name + "(";
        for (std::size_t i = 0; i < t.args.size(); ++i) s += (i ? ", " : "") + show(t.args[i]);
        return s + ")";
      }
      default:
        return show(t.args[0]) + " " + t.name + " " + show(t.args[1]);
    }
  }

  std::string_view src_;
  const Signature& sig_;
  const Scenario& scn_;
  ParseOptions opts_;
  std::size_t base_line_, base_col_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<Binder> binders_;
};

}  // namespace detail

/// Parses one formula. Positions in errors are 1-based; `line`/`column` shift
/// them when the text is embedded in a larger file.
inline Formula parse_formula(std::string_view text, const Signature& sig, ParseOptions opts = {}, std::size_t line = 1,
                             std::size_t column = 1) {
  return detail::FormulaParser(text, sig, opts, line, column).parse();
}

}  // namespace ctxkit

#endif  // CTXKIT_PARSER_HPP
