#ifndef CTXKIT_TOOLS_CLI_HPP
#define CTXKIT_TOOLS_CLI_HPP

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ctxkit/ctxkit.hpp"
#include "ctxkit/report.hpp"

namespace ctxkit::cli {

enum ExitCode { kOk = 0, kExpectMismatch = 1, kUsage = 2, kResource = 3 };

using report::Json;

namespace detail {

struct Common {
  std::string file;
  std::string example;
  bool json = false;
  bool interior = false;
  std::vector<std::string> expect;
};

inline void add_common(CLI::App* cmd, Common& c, bool needs_input = true) {
  if (needs_input) {
    cmd->add_option("file", c.file, "scenario file");
    cmd->add_option("--example", c.example, "use a built-in example instead of a file");
  }
  cmd->add_flag("--json", c.json, "print the report as JSON");
  cmd->add_flag("--interior", c.interior, "analyse the no-signalling interior instead");
  cmd->add_option("--expect", c.expect, "NAME[=true|false]: exit 1 unless the report flag has this value");
}

inline ScenarioFile load(const Common& c) {
  if (!c.example.empty() && !c.file.empty()) throw CLI::ValidationError("give either FILE or --example, not both");
  if (!c.example.empty()) return examples::get(c.example);
  if (c.file.empty()) throw CLI::ValidationError("missing scenario FILE (or --example NAME)");
  std::ifstream in(c.file);
  if (!in) throw ScenarioError("cannot open '" + c.file + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_scenario(ss.str());
  } catch (const ParseError& e) {
    throw ScenarioError(c.file + ":" + e.what());
  }
}

/// The model under analysis: explicit sections, else M[F]Γ; optionally its interior.
inline PresheafModel model_of(const ScenarioFile& f, bool interior) {
  std::optional<PresheafModel> m = f.model;
  if (!m && f.theory) m = mm_model(*f.theory);
  if (!m) throw ModelError("scenario '" + f.name + "' has neither sections nor a theory");
  return interior ? ns_interior(*m) : *m;
}

inline const Theory& theory_of(const ScenarioFile& f) {
  if (!f.theory) throw LogicError("scenario '" + f.name + "' has no theory block");
  return *f.theory;
}

inline void render_text(const Json& j, std::ostream& out, int indent) {
  std::string pad(static_cast<std::size_t>(indent), ' ');
  for (auto it = j.begin(); it != j.end(); ++it) {
    const Json& v = it.value();
    if (v.is_object()) {
      out << pad << it.key() << ":\n";
      render_text(v, out, indent + 2);
    } else if (v.is_array() && !v.empty() && v.front().is_object()) {
      out << pad << it.key() << ":\n";
      for (const Json& e : v) {
        out << pad << "  -\n";
        render_text(e, out, indent + 4);
      }
    } else if (v.is_array()) {
      out << pad << it.key() << ": [";
      for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << (v[i].is_string() ? v[i].get<std::string>() : v[i].dump());
      out << "]\n";
    } else {
      out << pad << it.key() << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
    }
  }
}

/// Returns the failed expectations as messages; throws on unknown names.
inline std::vector<std::string> check_expectations(const Json& j, const std::vector<std::string>& expect) {
  std::vector<std::string> failed;
  for (const auto& e : expect) {
    std::string name = e, want = "true";
    if (auto eq = e.find('='); eq != std::string::npos) {
      name = e.substr(0, eq);
      want = e.substr(eq + 1);
    }
    if (want != "true" && want != "false") throw CLI::ValidationError("--expect value must be true or false: " + e);
    std::string key = name;
    for (char& c : key)
      if (c == '-') c = '_';
    if (!j.contains(key) || !j[key].is_boolean()) throw CLI::ValidationError("--expect: the report has no flag '" + name + "'");
    bool got = j[key].get<bool>();
    if (got != (want == "true")) failed.push_back("expected " + name + " = " + want + ", got " + (got ? "true" : "false"));
  }
  return failed;
}

/// `example NAME [cmd args...]` becomes `cmd --example NAME args...`.
inline std::vector<std::string> rewrite_example(std::vector<std::string> args) {
  if (args.size() >= 2 && args[0] == "example") {
    std::string name = args[1];
    std::vector<std::string> out;
    std::size_t rest = 2;
    if (args.size() > 2 && args[2].rfind("-", 0) != 0) {
      out.push_back(args[2]);
      rest = 3;
    } else {
      out.push_back("print");
    }
    out.push_back("--example");
    out.push_back(name);
    out.insert(out.end(), args.begin() + static_cast<std::ptrdiff_t>(rest), args.end());
    return out;
  }
  return args;
}

}  // namespace detail

/// Runs the command line (without the program name); returns the exit code.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  using namespace detail;
  args = rewrite_example(std::move(args));

  CLI::App app{"Contextuality analysis of finite measurement scenarios", "ctxkit"};
  app.require_subcommand(1);
  Common c;
  std::string goal;
  bool trace = false;
  std::size_t k = 0;

  auto* print = app.add_subcommand("print", "print the scenario in file syntax");
  add_common(print, c);
  auto* check = app.add_subcommand("check", "separatedness, sheaf condition and no-signalling");
  add_common(check, c);
  auto* ctx = app.add_subcommand("contextuality", "logical and strong contextuality");
  add_common(ctx, c);
  auto* join = app.add_subcommand("join", "global sections (natural join)");
  add_common(join, c);
  auto* entail = app.add_subcommand("entail", "decide inchworm entailment of a goal from the theory");
  add_common(entail, c);
  entail->add_option("--goal", goal, "goal formula")->required();
  entail->add_flag("--trace", trace, "include a derivation trace");
  auto* interior = app.add_subcommand("interior", "no-signalling interior of the model");
  add_common(interior, c);
  auto* saturated = app.add_subcommand("saturated", "is the theory inchworm-saturated");
  add_common(saturated, c);
  auto* avn = app.add_subcommand("avn", "all-vs-nothing parity certificate for the XOR part of the theory");
  add_common(avn, c);
  auto* spiral = app.add_subcommand("spiral", "truncated spiral demonstration");
  add_common(spiral, c, false);
  spiral->add_option("--k", k, "domain size (>= 2)")->required()->check(CLI::Range(2, 4096));
  app.add_subcommand("example", "example NAME [command ...]: run a command on a built-in example");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    Json j;
    if (print->parsed()) {
      out << print_scenario(load(c));
      return kOk;
    } else if (check->parsed()) {
      j = report::check(model_of(load(c), c.interior));
    } else if (ctx->parsed()) {
      j = report::contextuality(model_of(load(c), c.interior));
    } else if (join->parsed()) {
      j = report::join(model_of(load(c), c.interior));
    } else if (entail->parsed()) {
      ScenarioFile f = load(c);
      const Theory& gamma = theory_of(f);
      Formula phi = parse_formula(goal, gamma.signature());
      EntailmentResult r = inchworm_entails(gamma, phi, trace);
      j = report::entail(gamma, phi, r, trace);
    } else if (interior->parsed()) {
      j = report::interior(model_of(load(c), false));
    } else if (saturated->parsed()) {
      j = report::saturated(theory_of(load(c)));
    } else if (avn->parsed()) {
      j = report::avn(theory_of(load(c)));
    } else if (spiral->parsed()) {
      j = report::spiral(spiral_demo(k));
    } else {
      err << "error: 'example' needs a NAME\n";
      return kUsage;
    }

    auto failed = check_expectations(j, c.expect);
    if (c.json) {
      Json full{{"schema_version", report::kSchemaVersion}};
      for (auto it = j.begin(); it != j.end(); ++it) full[it.key()] = it.value();
      out << full.dump(2) << "\n";
    } else {
      render_text(j, out, 0);
    }
    for (const auto& f : failed) err << "expectation failed: " << f << "\n";
    return failed.empty() ? kOk : kExpectMismatch;
  } catch (const ResourceError& e) {
    err << "resource limit: " << e.what() << "\n";
    return kResource;
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace ctxkit::cli

#endif  // CTXKIT_TOOLS_CLI_HPP
