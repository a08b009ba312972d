#ifndef CTXKIT_SCENARIO_FILE_HPP
#define CTXKIT_SCENARIO_FILE_HPP

#include <cctype>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctxkit/error.hpp"
#include "ctxkit/logic.hpp"
#include "ctxkit/model.hpp"
#include "ctxkit/parser.hpp"
#include "ctxkit/scenario.hpp"
#include "ctxkit/section.hpp"
#include "ctxkit/semantics.hpp"

namespace ctxkit {

/// Parsed contents of a scenario file: the scenario, and optionally an
/// explicit model and a theory over it.
struct ScenarioFile {
  std::string name;
  ScenarioPtr scenario;
  SignaturePtr signature;
  std::optional<PresheafModel> model;
  std::optional<Theory> theory;
};

namespace detail {

class ScenarioReader {
 public:
  explicit ScenarioReader(std::string_view text) : src_(text) {
    // Blank out comments so offsets stay valid.
    bool in_comment = false;
    for (char& c : src_) {
      if (c == '#') in_comment = true;
      if (c == '\n') in_comment = false;
      if (in_comment) c = ' ';
    }
  }

  ScenarioFile read() {
    struct PendingSections {
      std::vector<std::string> vars;
      std::vector<std::pair<std::string, std::size_t>> rows;  // digit string, offset
      std::size_t offset;
    };
    std::optional<std::string> name;
    std::vector<Domain> domains;
    std::vector<std::pair<std::string, std::string>> vars;
    std::vector<std::size_t> var_offsets;
    std::vector<std::pair<std::vector<std::string>, std::size_t>> facets;
    std::vector<PendingSections> sections, overrides;
    std::vector<std::pair<std::string, std::size_t>> formulas;
    bool saw_theory = false;

    while (true) {
      skip_space();
      if (pos_ >= src_.size()) break;
      std::size_t kw_off = pos_;
      std::string kw = word("a declaration keyword");
      if (kw == "scenario") {
        if (name) throw error("duplicate 'scenario' line", kw_off);
        name = word("a scenario name");
      } else if (kw == "domain") {
        std::size_t off = pos_;
        Domain d{word("a domain name"), {}, true};
        for (const auto& other : domains)
          if (other.name == d.name) throw error("domain '" + d.name + "' declared twice", off);
        expect('=');
        auto values = braced_words();
        for (const auto& [v, voff] : values) {
          if (d.value_index(v)) throw error("value '" + v + "' repeated in domain '" + d.name + "'", voff);
          d.values.push_back(v);
        }
        if (d.values.empty()) throw error("domain '" + d.name + "' has no values", off);
        if (peek_word() == "unordered") {
          word("");
          d.ordered = false;
        }
        domains.push_back(std::move(d));
      } else if (kw == "var") {
        std::vector<std::pair<std::string, std::size_t>> names;
        skip_inline_space();
        while (pos_ < src_.size() && src_[pos_] != ':' && src_[pos_] != '\n') {
          std::size_t off = pos_;
          names.emplace_back(word("a variable name"), off);
          skip_inline_space();
        }
        if (names.empty()) throw error("expected variable names", pos_);
        expect(':');
        std::size_t doff = pos_;
        skip_space();
        doff = pos_;
        std::string dom = word("a domain name");
        bool known = false;
        for (const auto& d : domains) known = known || d.name == dom;
        if (!known) throw error("unknown domain '" + dom + "'", doff);
        for (const auto& [n, off] : names) {
          for (const auto& [existing, _] : vars)
            if (existing == n) throw error("variable '" + n + "' declared twice", off);
          vars.emplace_back(n, dom);
          var_offsets.push_back(off);
        }
      } else if (kw == "context") {
        skip_inline_space();
        if (pos_ >= src_.size() || src_[pos_] != '{') throw error("expected '{'", pos_);
        while (true) {
          skip_inline_space();
          if (pos_ >= src_.size() || src_[pos_] != '{') break;
          std::size_t off = pos_;
          std::vector<std::string> names;
          for (auto& [v, voff] : braced_words()) {
            check_var(vars, v, voff);
            names.push_back(v);
          }
          facets.emplace_back(std::move(names), off);
        }
      } else if (kw == "sections" || kw == "override") {
        PendingSections p{{}, {}, kw_off};
        skip_space();
        for (auto& [v, voff] : braced_words()) {
          check_var(vars, v, voff);
          p.vars.push_back(v);
        }
        expect('=');
        p.rows = braced_words();
        (kw == "sections" ? sections : overrides).push_back(std::move(p));
      } else if (kw == "theory") {
        saw_theory = true;
        expect('{');
        std::size_t start = pos_;
        while (pos_ < src_.size() && src_[pos_] != '}') ++pos_;
        if (pos_ >= src_.size()) throw error("unterminated theory block", start);
        std::size_t piece = start;
        for (std::size_t i = start; i <= pos_; ++i) {
          if (i == pos_ || src_[i] == ';') {
            std::size_t b = piece;
            while (b < i && std::isspace(static_cast<unsigned char>(src_[b]))) ++b;
            if (b < i) formulas.emplace_back(src_.substr(b, i - b), b);
            piece = i + 1;
          }
        }
        ++pos_;
      } else {
        throw error("unknown declaration '" + kw + "'", kw_off);
      }
    }

    if (!name) throw error("missing 'scenario NAME' line", 0);
    if (vars.empty()) throw error("no variables declared", src_.size());
    if (facets.empty()) throw error("no contexts declared", src_.size());
    std::vector<std::vector<std::string>> facet_names;
    for (auto& f : facets) facet_names.push_back(f.first);
    ScenarioPtr scn;
    try {
      scn = make_scenario(*name, domains, vars, facet_names);
    } catch (const ScenarioError& e) {
      // Point coverage errors at the offending variable declaration.
      std::string msg = e.what();
      std::size_t off = 0;
      std::vector<std::string> names;
      for (std::size_t i = 0; i < vars.size(); ++i)
        if (msg.find("variable '" + vars[i].first + "' ") != std::string::npos) off = var_offsets[i];
      throw error(msg, off);
    }

    ScenarioFile out{*name, scn, std::make_shared<const Signature>(scn), std::nullopt, std::nullopt};
    if (!sections.empty()) {
      std::map<Context, SectionSet, CanonicalLess> data;
      for (const auto& p : sections) {
        Context c = scn->context(p.vars);
        if (data.count(c)) throw error("sections for " + scn->format(c) + " given twice", p.offset);
        bool facet = false;
        for (Context f : scn->facets()) facet = facet || f == c;
        if (!facet) throw error(scn->format(c) + " is not a facet; use 'override' for smaller contexts", p.offset);
        data.emplace(c, section_set(*scn, c, p));
      }
      for (Context f : scn->facets())
        if (!data.count(f)) throw error("no sections given for facet " + scn->format(f), src_.size());
      PresheafModel base = model_from_facet_sections(scn, data);
      if (overrides.empty()) {
        out.model = std::move(base);
      } else {
        auto sets = base.sets();
        for (const auto& p : overrides) {
          Context c = scn->context(p.vars);
          auto idx = scn->complex().member_index(c);
          if (!idx) throw error(scn->format(c) + " is not a context of the complex", p.offset);
          sets[*idx] = section_set(*scn, c, p);
        }
        try {
          out.model = PresheafModel(scn, std::move(sets));
        } catch (const ModelError& e) {
          throw error(e.what(), overrides.front().offset);
        }
      }
    } else if (!overrides.empty()) {
      throw error("'override' needs a 'sections' model", overrides.front().offset);
    }
    if (saw_theory) {
      std::vector<Formula> fs;
      for (const auto& [text, off] : formulas) {
        auto [l, c] = line_col(src_, off);
        fs.push_back(parse_formula(text, *out.signature, {}, l, c));
      }
      try {
        out.theory = Theory(out.signature, std::move(fs));
      } catch (const LogicError& e) {
        throw error(e.what(), formulas.empty() ? 0 : formulas.front().second);
      }
    }
    return out;
  }

 private:
  template <class Pending>
  SectionSet section_set(const Scenario& scn, Context c, const Pending& p) const {
    SectionSet s(scn, c);
    for (const auto& [row, off] : p.rows) {
      try {
        s.insert(parse_section_string(scn, c, row));
      } catch (const ScenarioError& e) {
        throw error(e.what(), off);
      }
    }
    return s;
  }

  void check_var(const std::vector<std::pair<std::string, std::string>>& vars, const std::string& v, std::size_t off) const {
    for (const auto& [n, _] : vars)
      if (n == v) return;
    throw error("unknown variable '" + v + "'", off);
  }

  ParseError error(const std::string& msg, std::size_t off) const {
    auto [l, c] = line_col(src_, off);
    return ParseError(msg, l, c);
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  void skip_inline_space() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\r')) ++pos_;
  }

  static bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

  std::string peek_word() {
    std::size_t save = pos_;
    skip_inline_space();
    std::size_t b = pos_;
    while (pos_ < src_.size() && word_char(src_[pos_])) ++pos_;
    std::string w = src_.substr(b, pos_ - b);
    pos_ = save;
    return w;
  }

  std::string word(const char* what) {
    skip_inline_space();
    std::size_t b = pos_;
    while (pos_ < src_.size() && word_char(src_[pos_])) ++pos_;
    if (b == pos_) {
      if (pos_ >= src_.size()) throw error(std::string("expected ") + what + " at end of input", pos_);
      throw error(std::string("expected ") + what + ", found '" + src_[pos_] + "'", pos_);
    }
    return src_.substr(b, pos_ - b);
  }

  void expect(char c) {
    skip_space();
    if (pos_ >= src_.size() || src_[pos_] != c) {
      if (pos_ >= src_.size()) throw error(std::string("expected '") + c + "' at end of input", pos_);
      throw error(std::string("expected '") + c + "', found '" + src_[pos_] + "'", pos_);
    }
    ++pos_;
  }

  std::vector<std::pair<std::string, std::size_t>> braced_words() {
    expect('{');
    std::vector<std::pair<std::string, std::size_t>> out;
    while (true) {
      skip_space();
      if (pos_ < src_.size() && src_[pos_] == '}') {
        ++pos_;
        return out;
      }
      if (pos_ < src_.size() && src_[pos_] == ',') {
        ++pos_;
        continue;
      }
      std::size_t off = pos_;
      out.emplace_back(word("a name or '}'"), off);
    }
  }

  std::string src_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses the line-oriented scenario format; errors carry line and column.
inline ScenarioFile parse_scenario(std::string_view text) { return detail::ScenarioReader(text).read(); }

/// Prints a scenario file that parses back to the same scenario, model and theory.
inline std::string print_scenario(const ScenarioFile& f) {
  const Scenario& scn = *f.scenario;
  std::string out = "scenario " + f.name + "\n";
  for (const auto& d : scn.domains()) {
    out += "domain " + d.name + " = {";
    for (const auto& v : d.values) out += " " + v;
    out += " }";
    if (!d.ordered) out += " unordered";
    out += "\n";
  }
  // Group consecutive variables that share a domain.
  for (std::size_t i = 0; i < scn.num_vars();) {
    std::size_t j = i;
    out += "var";
    while (j < scn.num_vars() && scn.variables()[j].domain == scn.variables()[i].domain) out += " " + scn.variables()[j++].name;
    out += " : " + scn.domains()[scn.variables()[i].domain].name + "\n";
    i = j;
  }
  out += "context";
  for (Context c : scn.facets()) {
    out += " {";
    for (const auto& n : scn.names_of(c)) out += " " + n;
    out += " }";
  }
  out += "\n";
  auto block = [&](const char* kw, const SectionSet& s) {
    out += std::string(kw) + " {";
    for (const auto& n : scn.names_of(s.context())) out += " " + n;
    out += " } = {";
    for (const auto& row : section_strings(scn, s)) out += " " + row;
    out += " }\n";
  };
  if (f.model) {
    std::map<Context, SectionSet, CanonicalLess> data;
    for (Context c : scn.facets()) {
      block("sections", f.model->at(c));
      data.emplace(c, f.model->at(c));
    }
    PresheafModel base = model_from_facet_sections(f.scenario, data);
    for (Context u : scn.members())
      if (!(base.at(u) == f.model->at(u))) block("override", f.model->at(u));
  }
  if (f.theory) {
    out += "theory {\n";
    for (std::size_t i = 0; i < f.theory->size(); ++i) {
      out += "  " + to_string((*f.theory)[i], scn);
      out += i + 1 < f.theory->size() ? " ;\n" : "\n";
    }
    out += "}\n";
  }
  return out;
}

}  // namespace ctxkit

#endif  // CTXKIT_SCENARIO_FILE_HPP
