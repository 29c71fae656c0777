#include "sbpg/cli/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "sbpg/cli/manifest.hpp"
#include "sbpg/cli/svg_plot.hpp"
#include "sbpg/config.hpp"
#include "sbpg/error.hpp"
#include "sbpg/json_util.hpp"
#include "sbpg/potential.hpp"
#include "sbpg/train/metrics_io.hpp"
#include "sbpg/train/sweep.hpp"
#include "sbpg/train/trainer.hpp"
#include "sbpg/verify/best_response.hpp"
#include "sbpg/verify/conditions.hpp"
#include "sbpg/verify/gradcheck.hpp"

namespace fs = std::filesystem;

namespace sbpg::cli {
namespace {

const std::vector<std::string> kChecks = {"cross_partials", "potential_alignment",
                                          "state_partials", "gradcheck", "best_response"};

struct CommonOptions {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::string> variant;
  std::optional<std::uint64_t> seed;
  std::optional<int> episodes;
  std::optional<double> horizon;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool training_flags) {
  cmd->add_option("--config", o.config, "JSON experiment config")->required();
  cmd->add_option("--set", o.sets, "Override as section.key=value (repeatable)");
  if (!training_flags) return;
  cmd->add_option("--variant", o.variant, "sbpg, ds2 or stack")
      ->check(CLI::IsMember({"sbpg", "ds2", "stack"}));
  cmd->add_option("--seed", o.seed, "Random seed");
  cmd->add_option("--episodes", o.episodes, "Training episodes")->check(CLI::NonNegativeNumber);
  cmd->add_option("--horizon", o.horizon, "Seconds of sim time per episode")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
}

nlohmann::json load_document(const CommonOptions& o) {
  if (!fs::exists(o.config)) throw ConfigError("config file '" + o.config + "' not found");
  std::vector<std::string> overrides = o.sets;
  if (o.variant) overrides.push_back("training.variant=\"" + *o.variant + "\"");
  if (o.seed) overrides.push_back("training.seed=" + std::to_string(*o.seed));
  if (o.episodes) overrides.push_back("training.episodes=" + std::to_string(*o.episodes));
  if (o.horizon) overrides.push_back("training.horizon=" + nlohmann::json(*o.horizon).dump());
  if (o.threads) overrides.push_back("training.threads=" + std::to_string(*o.threads));
  return load_config_document(o.config, overrides);
}

std::string player_prefix(std::size_t i, const std::string& id) {
  return "p" + std::to_string(i + 1) + "_" + id;
}

// ---------------------------------------------------------------------------

int cmd_train(const CommonOptions& o, const std::string& out_dir, bool debug, std::ostream& out,
              std::ostream& err) {
  const nlohmann::json doc = load_document(o);
  const ExperimentConfig config = parse_config(doc);
  const train::TrainingPlan plan = train::plan_from(config);
  if (plan.variant == VariantKind::stack && train::stack_degenerates(config)) {
    err << "warning: every objective hierarchy has two entries; stack degenerates to ds2\n";
  }

  const fs::path dir(out_dir);
  fs::create_directories(dir / "maps");
  std::ofstream trace(dir / "trace.csv");
  std::ofstream episodes(dir / "episodes.jsonl");
  if (!trace || !episodes) throw Error("cannot write into " + dir.string());
  train::write_trace_header(trace, train::trace_layout(config.plant));

  RunManifest manifest;
  manifest.command = "train";
  manifest.config_hash = config_hash(config.document);
  manifest.seed = plan.seed;
  manifest.variant = to_string(plan.variant);
  manifest.version = SBPG_VERSION;
  manifest.config = config.document;
  manifest.outputs = {"episodes.jsonl", "trace.csv"};

  train::TrainingResult result;
  try {
    result = train::run_training(config, plan, [&](const train::EpisodeMetrics& e) {
      train::write_trace_rows(trace, e);
      train::write_episode_jsonl(episodes, e);
      trace.flush();
      episodes.flush();
      out << (e.eval ? "eval" : "episode " + std::to_string(e.episode + 1))
          << ": demand=" << e.demand_fulfillment << " overflow=" << e.overflow
          << " L power=" << e.mean_power << " W potential=" << e.mean_potential << '\n';
    });
  } catch (...) {
    write_manifest(dir, manifest);
    throw;
  }

  nlohmann::json stats = nlohmann::json::array();
  for (std::size_t i = 0; i < result.agents.size(); ++i) {
    const std::string prefix = player_prefix(i, config.plant.actuators[i].id);
    result.agents[i]->save_maps(dir / "maps", prefix);
    const learn::LearnStats& s = result.agents[i]->stats();
    stats.push_back({{"player", config.plant.actuators[i].id},
                     {"decisions", s.decisions},
                     {"fits", s.fits},
                     {"singular_fits", s.singular_fits},
                     {"hessian_fallbacks", s.hessian_fallbacks},
                     {"map_improvements", s.map_improvements}});
  }
  std::ofstream(dir / "learn_stats.json") << stats.dump(2) << '\n';
  manifest.outputs.push_back("learn_stats.json");
  if (debug) {
    nlohmann::json coef = nlohmann::json::array();
    for (const auto& a : result.agents) coef.push_back(a->debug_json());
    std::ofstream(dir / "coefficients.json") << coef.dump(1) << '\n';
    manifest.outputs.push_back("coefficients.json");
  }
  for (const auto& entry : fs::directory_iterator(dir / "maps")) {
    manifest.outputs.push_back("maps/" + entry.path().filename().string());
  }
  std::sort(manifest.outputs.begin(), manifest.outputs.end());
  write_manifest(dir, manifest);
  return kOk;
}

// ---------------------------------------------------------------------------

int cmd_verify(const CommonOptions& o, const std::vector<std::string>& checks,
               const std::string& out_path, std::ostream& out) {
  std::vector<std::string> selected;
  for (const auto& c : checks) {
    std::stringstream ss(c);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      if (std::find(kChecks.begin(), kChecks.end(), item) == kChecks.end()) {
        throw ConfigError("unknown check '" + item + "'");
      }
      selected.push_back(item);
    }
  }
  if (selected.empty()) selected = kChecks;

  const ExperimentConfig config = parse_config(load_document(o));
  const auto model = verify::make_utility_model(config);
  const VerifySettings& v = config.verify;
  const std::uint64_t seed = config.training.seed;

  nlohmann::json report = nlohmann::json::object();
  bool pass = true;
  auto has = [&](const std::string& name) {
    return std::find(selected.begin(), selected.end(), name) != selected.end();
  };
  if (has("cross_partials")) {
    const auto r = verify::check_cross_partials(
        *model, {v.samples, v.fd_step, v.cross_tolerance, seed});
    pass = pass && r.pass;
    report["cross_partials"] = r.to_json();
  }
  if (has("potential_alignment")) {
    const auto r = verify::check_potential_alignment(
        *model, [](std::span<const double> u) { return potential_value(u); },
        {v.alignment_samples, v.fd_step, v.alignment_tolerance, seed});
    pass = pass && r.pass;
    report["potential_alignment"] = r.to_json();
  }
  if (has("state_partials")) {
    const auto r = verify::check_state_partials(
        *model, {v.samples, v.fd_step, v.state_tolerance, seed});
    pass = pass && r.pass;
    report["state_partials"] = r.to_json();
  }
  if (has("gradcheck")) {
    const auto r = verify::gradcheck_random(v.gradcheck_points, seed, v.gradcheck_tolerance,
                                            config.ds2_learner.hessian_eps, v.fd_step);
    pass = pass && r.pass;
    report["gradcheck"] = r.to_json();
  }
  if (has("best_response")) {
    const auto r = verify::check_best_response(v.best_response_models, config.ds2_learner.momentum,
                                               500, seed);
    pass = pass && r.pass;
    report["best_response"] = r.to_json();
  }
  report["pass"] = pass;

  const std::string text = report.dump(2);
  if (!out_path.empty()) {
    const fs::path p(out_path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream(p) << text << '\n';
  }
  for (const auto& name : selected) {
    out << name << ": " << (report[name]["pass"].get<bool>() ? "pass" : "FAIL") << '\n';
  }
  if (out_path.empty()) out << text << '\n';
  return pass ? kOk : kFailure;
}

// ---------------------------------------------------------------------------

struct VariantRun {
  std::string label;
  std::vector<train::EpisodeMetrics> episodes;
};

void collect_runs(const fs::path& dir, std::vector<VariantRun>& runs) {
  if (fs::exists(dir / "trace.csv")) {
    std::ifstream in(dir / "trace.csv");
    VariantRun run;
    const auto manifest = read_manifest(dir);
    run.label = manifest ? manifest->variant : dir.filename().string();
    try {
      run.episodes = train::read_trace_csv(in);
    } catch (const MetricsFormatError& e) {
      throw MetricsFormatError((dir / "trace.csv").string() + ": " + e.what());
    }
    runs.push_back(std::move(run));
    return;
  }
  if (!fs::is_directory(dir)) throw Error("metrics directory '" + dir.string() + "' not found");
  std::vector<fs::path> subdirs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory() && fs::exists(entry.path() / "trace.csv")) {
      subdirs.push_back(entry.path());
    }
  }
  std::sort(subdirs.begin(), subdirs.end());
  for (const auto& s : subdirs) collect_runs(s, runs);
}

int cmd_plot(const std::vector<std::string>& metrics, const std::string& out_dir,
             std::ostream& out) {
  std::vector<VariantRun> runs;
  for (const auto& m : metrics) collect_runs(m, runs);
  runs.erase(std::remove_if(runs.begin(), runs.end(),
                            [](const VariantRun& r) { return r.episodes.empty(); }),
             runs.end());
  if (runs.empty()) throw Error("no metrics found");
  std::map<std::string, int> seen;
  for (auto& r : runs) {
    if (seen[r.label]++ > 0) r.label += "#" + std::to_string(seen[r.label]);
  }

  struct Metric {
    const char* file;
    const char* title;
    const char* unit;
    double (*get)(const train::EpisodeMetrics&);
  };
  const Metric kMetrics[] = {
      {"demand.svg", "Production demand fulfilment", "fraction",
       [](const train::EpisodeMetrics& e) { return e.demand_fulfillment; }},
      {"overflow.svg", "Overflow", "L",
       [](const train::EpisodeMetrics& e) { return e.overflow; }},
      {"power.svg", "Mean power", "W",
       [](const train::EpisodeMetrics& e) { return e.mean_power; }},
      {"potential.svg", "Mean potential value", "potential",
       [](const train::EpisodeMetrics& e) { return e.mean_potential; }},
  };

  const fs::path dir(out_dir);
  fs::create_directories(dir);
  for (const Metric& m : kMetrics) {
    std::vector<Series> series;
    for (const auto& r : runs) {
      Series s{r.label, {}, {}};
      for (const auto& e : r.episodes) {
        s.x.push_back(e.episode + 1);
        s.y.push_back(m.get(e));
      }
      series.push_back(std::move(s));
    }
    std::ofstream(dir / m.file) << line_chart_svg(m.title, "episode", m.unit, series);
    out << (dir / m.file).string() << '\n';
  }
  if (runs.size() > 1) {
    std::vector<std::string> labels;
    std::vector<BarPanel> panels;
    for (const auto& r : runs) labels.push_back(r.label);
    for (const Metric& m : kMetrics) {
      BarPanel p{m.title, {}};
      for (const auto& r : runs) p.values.push_back(m.get(r.episodes.back()));
      panels.push_back(std::move(p));
    }
    std::ofstream(dir / "comparison.svg") << bar_chart_svg("Final episode", labels, panels);
    out << (dir / "comparison.svg").string() << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------------------

int cmd_sweep(const CommonOptions& o, const std::string& space_path, int trials,
              const std::string& out_path, std::ostream& out) {
  if (trials < 1) throw ConfigError("--trials must be >= 1");
  std::ifstream in(space_path);
  if (!in) throw ConfigError("cannot read search space '" + space_path + "'");
  const nlohmann::json space_doc = nlohmann::json::parse(in, nullptr, false);
  if (space_doc.is_discarded()) throw ConfigError("search space is not JSON");
  const train::SearchSpace space = train::SearchSpace::from_json(space_doc);

  const nlohmann::json doc = load_document(o);
  const ExperimentConfig base = parse_config(doc);
  train::SweepBudget budget;
  budget.trials = trials;
  budget.episodes = base.training.episodes;
  budget.horizon = base.training.horizon;
  budget.seed = base.training.seed;
  budget.threads = base.training.threads;
  budget.variant = base.training.variant;

  const auto ranked = train::sweep(doc, space, budget);
  const nlohmann::json report = train::sweep_report(ranked, budget);
  if (!out_path.empty()) {
    const fs::path p(out_path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream(p) << report.dump(2) << '\n';
  }
  for (const auto& t : ranked) {
    out << t.score << "  demand=" << t.eval.demand_fulfillment << " overflow=" << t.eval.overflow
        << " power=" << t.eval.mean_power << "  ";
    for (const auto& a : t.assignments) out << a << ' ';
    out << '\n';
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stackelberg learning in state-based potential games on a bulk-good plant"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SBPG_VERSION);

  CommonOptions train_opts;
  std::string train_out = "runs/latest";
  bool debug = false;
  auto* train_cmd = app.add_subcommand("train", "Train one variant and evaluate it");
  add_common(train_cmd, train_opts, true);
  train_cmd->add_option("--out", train_out, "Output directory");
  train_cmd->add_flag("--debug-coefficients", debug, "Dump fitted surrogate coefficients");

  CommonOptions verify_opts;
  std::vector<std::string> checks;
  std::string verify_out;
  auto* verify_cmd = app.add_subcommand("verify", "Check the potential-game conditions");
  add_common(verify_cmd, verify_opts, false);
  verify_cmd->add_option("--checks", checks, "Comma separated subset of checks");
  verify_cmd->add_option("--out", verify_out, "Write the JSON report here");

  std::vector<std::string> metrics;
  std::string plot_out = "plots";
  auto* plot_cmd = app.add_subcommand("plot", "Render SVG charts from training traces");
  plot_cmd->add_option("--metrics", metrics, "Run directories (or parents of them)")->required();
  plot_cmd->add_option("--out", plot_out, "Output directory");

  CommonOptions sweep_opts;
  std::string space;
  int trials = 8;
  std::string sweep_out;
  auto* sweep_cmd = app.add_subcommand("sweep", "Random hyperparameter search");
  add_common(sweep_cmd, sweep_opts, true);
  sweep_cmd->add_option("--space", space, "JSON search space")->required();
  sweep_cmd->add_option("--trials", trials, "Number of random draws");
  sweep_cmd->add_option("--out", sweep_out, "Write the JSON report here");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << SBPG_VERSION << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidConfig;
  }

  try {
    if (*train_cmd) return cmd_train(train_opts, train_out, debug, out, err);
    if (*verify_cmd) return cmd_verify(verify_opts, checks, verify_out, out);
    if (*plot_cmd) return cmd_plot(metrics, plot_out, out);
    if (*sweep_cmd) return cmd_sweep(sweep_opts, space, trials, sweep_out, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const GraphError& e) {
    err << "config error: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kInvalidConfig;
}

}  // namespace sbpg::cli
