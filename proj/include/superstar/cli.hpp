#pragma once

// Command-line front end. Exit codes: 0 success, 1 verification failure,
// 2 usage or input error. Reports go to `out`, diagnostics to `err`.

#include <algorithm>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "superstar/model_file.hpp"

namespace superstar {

inline bool is_builtin_name(const std::string& name) {
  const auto names = builtin_names();
  return std::find(names.begin(), names.end(), name) != names.end() || name.rfind("P3|N=", 0) == 0;
}

/// A built-in name or a path to a model file.
inline ModelSpec load_model(const std::string& source) {
  if (is_builtin_name(source)) return builtin(source);
  if (std::filesystem::exists(source)) return parse_model_file(source);
  throw UnknownModel("'" + source + "' is neither a built-in model nor a readable file");
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact star products and Poisson checks on super twistor models", "superstar"};
  app.require_subcommand(1);

  std::string model_arg;
  unsigned order = 0;
  bool json = false, quiet = false, aliases = false;
  auto model_options = [&](CLI::App* sub) {
    sub->add_option("model", model_arg, "built-in model name or model file")->required();
    sub->add_option("--order", order, "maximum hbar order (default from the model)")
        ->check(CLI::Range(1u, 64u));
    sub->add_flag("--json", json, "line-delimited JSON records");
    sub->add_flag("--aliases", aliases, "render variables with display aliases");
  };

  auto* verify = app.add_subcommand("verify", "run every check of a model");
  model_options(verify);
  verify->add_flag("--quiet", quiet, "print failures only");

  std::string lhs, rhs;
  auto* star_cmd = app.add_subcommand("star", "print the star product of two expressions");
  model_options(star_cmd);
  star_cmd->add_option("--lhs", lhs, "left factor")->required();
  star_cmd->add_option("--rhs", rhs, "right factor")->required();

  auto* comm = app.add_subcommand("comm", "print the supercommutator of two expressions");
  model_options(comm);
  comm->add_option("--a", lhs, "first argument")->required();
  comm->add_option("--b", rhs, "second argument")->required();

  auto* list = app.add_subcommand("list-builtins", "list built-in model names");

  std::vector<int> projective, weighted, odd_weights;
  int ambitwistor = -1;
  auto* cy = app.add_subcommand("cy", "Calabi-Yau index of a projective-type space");
  auto* cy_p = cy->add_option("--projective", projective, "n N")->expected(2);
  auto* cy_w = cy->add_option("--weighted", weighted, "even weights, then '--' and odd weights")
                   ->expected(1, 64);
  cy->add_option("odd", odd_weights, "odd weights (after '--')");
  auto* cy_a = cy->add_option("--ambitwistor", ambitwistor, "N");
  cy_p->excludes(cy_w)->excludes(cy_a);
  cy_w->excludes(cy_a);
  cy->add_flag("--json", json, "JSON output");

  auto* exp = app.add_subcommand("export", "print a model in the model-file format");
  exp->add_option("model", model_arg, "built-in model name or model file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "superstar: " << e.what() << '\n';
    err << "run 'superstar --help' for usage\n";
    return 2;
  }

  try {
    if (list->parsed()) {
      for (const auto& n : builtin_names()) out << n << '\n';
      return 0;
    }
    if (cy->parsed()) {
      CYWeights w;
      if (cy_p->count()) {
        w.kind = CYWeights::Kind::projective;
        w.n = projective[0];
        w.N = projective[1];
      } else if (cy_w->count()) {
        w.kind = CYWeights::Kind::weighted;
        w.k = weighted;
        w.l = odd_weights;
      } else if (cy_a->count()) {
        w.kind = CYWeights::Kind::ambitwistor;
        w.N = ambitwistor;
      } else {
        err << "superstar: cy needs one of --projective, --weighted, --ambitwistor\n";
        return 2;
      }
      if (!cy_w->count() && !odd_weights.empty()) {
        err << "superstar: odd weights are only meaningful with --weighted\n";
        return 2;
      }
      const auto idx = calabi_yau_index(w);
      const bool yes = is_calabi_yau(w);
      if (json) {
        nlohmann::ordered_json j;
        j["index"] = idx;
        j["calabi_yau"] = yes;
        out << j.dump() << '\n';
      } else {
        out << "index ";
        for (std::size_t i = 0; i < idx.size(); ++i) out << (i ? "," : "") << idx[i];
        out << ", Calabi-Yau: " << (yes ? "yes" : "no") << '\n';
      }
      return 0;
    }

    ModelSpec model = load_model(model_arg);
    if (exp->parsed()) {
      out << serialize_model(model);
      return 0;
    }
    if (order) model.order = order;
    if (verify->parsed()) {
      VerifyOptions opt;
      opt.use_aliases = aliases;
      const VerificationReport report = verify_model(model, opt);
      write_report(out, report, json, quiet);
      return report.passed() ? 0 : 1;
    }

    const GradedPoly f = parse_expression(lhs, model.table);
    const GradedPoly g = parse_expression(rhs, model.table);
    const StarEngine engine(model.bivector, model.order);
    const GradedPoly r = star_cmd->parsed() ? star(engine, f, g) : supercommutator(engine, f, g);
    const std::string text = render(r, model.table, aliases ? &model.aliases : nullptr);
    if (json) {
      nlohmann::ordered_json j;
      j["model"] = model.name;
      j["operation"] = star_cmd->parsed() ? "star" : "comm";
      j["lhs"] = lhs;
      j["rhs"] = rhs;
      j["result"] = text;
      out << j.dump() << '\n';
    } else {
      out << text << '\n';
    }
    return 0;
  } catch (const Error& e) {
    err << "superstar: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace superstar
