#include <CLI11.hpp>
#include <cctype>
#include <filesystem>
#include <iostream>
#include <string>

#include "periop/pipeline.hpp"
#include "periop/serialize.hpp"
#include "periop/synthgen.hpp"

namespace fs = std::filesystem;
using periop::io::Json;
namespace pl = periop::pipeline;

namespace {

struct CommonFlags {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out = "out";
  std::string preset;
  bool paper_faithful = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "JSON config file");
  cmd->add_option("--seed", f.seed, "master seed")->each([&f](const std::string&) { f.seed_given = true; });
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--preset", f.preset, "cohort preset");
  cmd->add_flag("--paper-faithful", f.paper_faithful, "fit imputation tables on the full data before splitting");
}

pl::RunConfig run_config(const CommonFlags& f) {
  pl::RunConfig cfg;
  if (!f.config.empty()) cfg = pl::config_from_json(periop::io::read_json(f.config));
  if (!f.preset.empty()) {
    cfg.preset = f.preset;
    cfg.input.clear();
    cfg.schema.clear();
  }
  if (f.seed_given) cfg.seed = f.seed;
  if (f.paper_faithful) cfg.paper_faithful = true;
  pl::validate(cfg);
  return cfg;
}

void print_done(const std::string& command, const fs::path& out) {
  std::cout << Json{{"status", "ok"}, {"command", command}, {"out", out.string()}}.dump() << '\n';
}

void cmd_simulate(const CommonFlags& f) {
  periop::synth::CohortSpec spec;
  if (!f.config.empty()) {
    spec = periop::io::cohort_spec_from_json(periop::io::read_json(f.config));
    if (f.seed_given) spec.seed = f.seed;
  } else {
    if (f.preset.empty()) periop::fail(periop::ErrorCode::InvalidConfig, "simulate needs --preset or --config");
    spec = periop::synth::preset(f.preset, f.seed);
  }
  const auto cohort = periop::synth::generate(spec);
  const fs::path out(f.out);
  periop::write_csv(out / "cohort.csv", cohort.data);
  periop::io::write_text(out / "schema.json", periop::io::dump(periop::io::to_json(cohort.data.schema())));
  periop::io::write_text(out / "truth.json", periop::io::dump(periop::io::truth_json(spec, cohort)));
  print_done("simulate", out);
}

void cmd_impute(const CommonFlags& f) {
  const auto cfg = run_config(f);
  const auto p = pl::prepare(cfg);
  const fs::path out(f.out);
  periop::write_csv(out / "imputed_train.csv", p.split.train);
  periop::write_csv(out / "imputed_test.csv", p.split.test);
  if (p.imputer) periop::io::write_text(out / "imputation.json", periop::io::dump(periop::io::to_json(*p.imputer)));
  print_done("impute", out);
}

std::string safe_name(const std::string& name) {
  std::string out;
  for (char c : name) out += std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_';
  return out;
}

void cmd_eda(const CommonFlags& f) {
  const auto cfg = run_config(f);
  const auto p = pl::prepare(cfg);
  pl::RunConfig on = cfg;
  on.eda = true;
  const auto res = pl::run_eda(on, p);
  const fs::path out(f.out);
  for (const auto& [var, curve] : res.curves)
    periop::io::write_text(out / "eda" / ("logit_" + safe_name(var) + ".csv"), periop::eda::curve_csv(curve));
  for (const auto& g : res.grids) {
    std::string text = periop::eda::grid_csv(g);
    for (const auto& w : g.warnings) text += "# warning: " + w + "\n";
    periop::io::write_text(out / "eda" / ("interaction_" + safe_name(g.var_a) + "_x_" + safe_name(g.var_b) + ".csv"),
                           text);
  }
  print_done("eda", out);
}

Json selections_json(const pl::Selections& s) {
  Json arr = Json::array();
  for (const auto& r : s.records)
    arr.push_back(Json{{"mode", pl::to_string(r.mode)},
                       {"model", r.model ? Json(pl::to_string(*r.model)) : Json()},
                       {"variables", r.variables},
                       {"trace", r.trace},
                       {"error", r.error.empty() ? Json() : Json{{"code", r.error_code}, {"message", r.error}}}});
  return arr;
}

void write_selections(const pl::Selections& s, const fs::path& out) {
  periop::io::write_text(out / "selection.json", periop::io::dump(selections_json(s)));
  for (const auto& r : s.records)
    for (const auto& [name, text] : r.csv) periop::io::write_text(out / "selection" / name, text);
}

void cmd_select(const CommonFlags& f) {
  const auto cfg = run_config(f);
  const auto p = pl::prepare(cfg);
  write_selections(pl::select_variables(cfg, p), f.out);
  print_done("select", f.out);
}

void cmd_train(const CommonFlags& f) {
  const auto cfg = run_config(f);
  const auto p = pl::prepare(cfg);
  const auto sel = pl::select_variables(cfg, p);
  const fs::path out(f.out);
  write_selections(sel, out);
  Json index = Json::array();
  for (auto s : cfg.selections)
    for (auto m : cfg.models) {
      const auto* rec = sel.find(s, m);
      const std::string name = pl::to_string(m) + "_" + pl::to_string(s) + ".json";
      Json entry{{"model", pl::to_string(m)}, {"selection", pl::to_string(s)}, {"file", Json()}, {"error", Json()}};
      try {
        if (!rec || !rec->error.empty())
          periop::fail(periop::ErrorCode::InvalidConfig, rec ? rec->error : "no selection");
        const auto model = pl::fit_model(cfg, m, p.split.train, p.outcome, rec->variables);
        periop::io::write_text(out / "models" / name, periop::io::dump(pl::model_to_json(model)));
        entry["file"] = name;
      } catch (const periop::Error& e) {
        entry["error"] = Json{{"code", std::string(periop::to_string(e.code()))}, {"message", e.what()}};
      }
      index.push_back(entry);
    }
  periop::io::write_text(out / "models" / "index.json", periop::io::dump(index));
  print_done("train", out);
}

void cmd_evaluate(const CommonFlags& f) {
  const auto cfg = run_config(f);
  const auto p = pl::prepare(cfg);
  const fs::path out(f.out);
  const Json index = periop::io::read_json(out / "models" / "index.json");
  Json results = Json::array();
  for (const auto& e : index) {
    Json r{{"model", e.at("model")}, {"selection", e.at("selection")}};
    if (e.at("file").is_null()) {
      r["error"] = e.at("error");
    } else {
      try {
        const auto model = pl::model_from_json(
            periop::io::read_json(out / "models" / e.at("file").get<std::string>()), p.split.train.schema());
        const auto y_in = p.split.train.outcome(p.outcome);
        const auto y_out = p.split.test.outcome(p.outcome);
        r["in_sample"] = periop::io::to_json(periop::evaluate(y_in, pl::predict_model(model, p.split.train)));
        r["out_of_sample"] = periop::io::to_json(periop::evaluate(y_out, pl::predict_model(model, p.split.test)));
      } catch (const periop::Error& err) {
        r["error"] = Json{{"code", std::string(periop::to_string(err.code()))}, {"message", err.what()}};
      }
    }
    results.push_back(r);
  }
  periop::io::write_text(out / "evaluation.json", periop::io::dump(results));
  print_done("evaluate", out);
}

void cmd_run(const CommonFlags& f) {
  const auto cfg = run_config(f);
  const auto report = pl::run(cfg);
  pl::write_outputs(report, f.out);
  std::cout << pl::render_table(report);
}

void cmd_report(const CommonFlags& f) {
  const fs::path out(f.out);
  const Json report = periop::io::read_json(out / "report.json");
  const std::string text = pl::render_table(report);
  periop::io::write_text(out / "report.txt", text);
  std::cout << text;
}

void print_error(const std::string& code, const std::string& message) {
  std::cerr << Json{{"error", {{"code", code}, {"message", message}}}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perioperative complication risk modelling toolkit"};
  app.require_subcommand(1);
  CommonFlags flags;
  struct Sub {
    const char* name;
    const char* help;
    void (*fn)(const CommonFlags&);
  };
  const Sub subs[] = {
      {"simulate", "generate a synthetic cohort", cmd_simulate},
      {"impute", "split and impute with conditional tables", cmd_impute},
      {"eda", "empirical logit curves and interaction grids", cmd_eda},
      {"select", "variable selection on the train partition", cmd_select},
      {"train", "select and fit models, write them to <out>/models", cmd_train},
      {"evaluate", "evaluate fitted models from <out>/models", cmd_evaluate},
      {"run", "full pipeline with report", cmd_run},
      {"report", "re-render <out>/report.json as text", cmd_report},
  };
  std::vector<std::pair<CLI::App*, void (*)(const CommonFlags&)>> commands;
  for (const auto& s : subs) {
    CLI::App* cmd = app.add_subcommand(s.name, s.help);
    add_common(cmd, flags);
    commands.emplace_back(cmd, s.fn);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("UsageError", e.what());
    return 2;
  }

  try {
    for (const auto& [cmd, fn] : commands)
      if (cmd->parsed()) fn(flags);
  } catch (const periop::Error& e) {
    print_error(std::string(periop::to_string(e.code())), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("Internal", e.what());
    return 1;
  }
  return 0;
}
