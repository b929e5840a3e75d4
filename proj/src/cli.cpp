#include "gacl/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "gacl/colony.hpp"
#include "gacl/envtask.hpp"
#include "gacl/harness.hpp"
#include "gacl/io.hpp"
#include "gacl/metrics.hpp"
#include "gacl/neural.hpp"
#include "gacl/rng.hpp"
#include "gacl/svg.hpp"

namespace gacl::cli {

namespace {

std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string out;
  for (const auto& s : v) {
    if (!out.empty()) out += sep;
    out += s;
  }
  return out;
}

// key=value tokens (CLI) and flat JSON config files share one validator.
void set_override(CliConfig& cfg, const std::string& key, double value,
                  const std::set<std::string>& known) {
  if (key == "replicates") {
    cfg.replicates = static_cast<int>(std::llround(value));
    return;
  }
  if (!known.count(key))
    throw CLI::ValidationError("unknown config key: " + key);
  cfg.overrides[key] = value;
}

void load_config_file(CliConfig& cfg, const std::string& path,
                      const std::set<std::string>& known) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(io::read_text_file(path));
  } catch (const std::exception& e) {
    throw CLI::ValidationError(path + ": " + e.what());
  }
  if (!doc.is_object())
    throw CLI::ValidationError(path + ": config must be a JSON object");
  for (const auto& [key, v] : doc.items()) {
    if (!v.is_number())
      throw CLI::ValidationError(path + ": value for '" + key +
                                 "' must be a number");
    set_override(cfg, key, v.get<double>(), known);
  }
}

void apply_kv_tokens(CliConfig& cfg, const std::vector<std::string>& tokens,
                     const std::set<std::string>& known) {
  for (const auto& tok : tokens) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0)
      throw CLI::ValidationError("expected key=value, got '" + tok + "'");
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    double num;
    try {
      num = io::parse_double(val, tok);
    } catch (const std::exception&) {
      throw CLI::ValidationError("value of '" + key + "' is not a number: '"
                                 + val + "'");
    }
    set_override(cfg, key, num, known);
  }
}

}  // namespace

ParseOutcome parse_args(const std::vector<std::string>& args) {
  ParseOutcome out;
  CliConfig& cfg = out.cfg;

  const auto exp_names = harness::experiment_names();
  const auto key_list = harness::known_override_keys();
  const std::set<std::string> known(key_list.begin(), key_list.end());

  CLI::App app{"Colony-learning / neural-network workbench", "gacl"};
  app.require_subcommand(1);
  app.footer("experiments: " + join(exp_names, ", ") +
             "\nconfig keys:  replicates, " + join(key_list, ", "));

  std::string config_file;
  app.add_option("--seed", cfg.seed, "master random seed")
      ->default_val(std::uint64_t{42});
  app.add_option("--out", cfg.out_dir, "output directory ($GACL_OUT, ./out)");
  app.add_option("--data", cfg.data_dir, "dataset directory");
  app.add_option("-c,--config", config_file,
                 "JSON config file with flat keys (flags override it)");
  app.add_option("--replicates", cfg.replicates,
                 "replicates per condition (0 = experiment default)");

  std::vector<std::string> kv;
  auto add_kv = [&](CLI::App* sub) {
    sub->add_option("overrides", kv, "key=value config overrides")
        ->allow_extra_args(true);
    sub->fallthrough();
  };

  // Both subcommands bind cfg.task, so the defaults are display-only here
  // and filled in after the chosen subcommand is known.
  auto* sim = app.add_subcommand("simulate", "run one colony trajectory");
  sim->add_option("--task", cfg.task, "site task tier")
      ->default_str("easy")
      ->check(CLI::IsMember({"easy", "moderate", "subtle"}));
  add_kv(sim);

  auto* train = app.add_subcommand("train", "train one network");
  train->add_option("--task", cfg.task, "decision-boundary family")
      ->default_str("linear")
      ->check(CLI::IsMember({"linear", "quadratic", "complex"}));
  add_kv(train);

  auto* exp = app.add_subcommand("experiment", "run one named experiment");
  exp->add_option("name", cfg.experiment_name, "experiment name")
      ->required()
      ->check(CLI::IsMember(exp_names));
  add_kv(exp);

  auto* bench = app.add_subcommand("bench", "run the benchmark table");
  add_kv(bench);

  auto* all = app.add_subcommand("all", "run every experiment");
  add_kv(all);

  auto* plot = app.add_subcommand("plot", "render an SVG line chart");
  plot->add_option("--in", cfg.plot_input, "input CSV")->required();
  plot->add_option("--svg", cfg.plot_output, "output SVG path")->required();
  plot->add_option("--x", cfg.plot_x, "x column")->capture_default_str();
  plot->add_option("--y", cfg.plot_y, "y columns (default: all numeric)");
  plot->add_option("--pivot", cfg.plot_pivot_metric,
                   "pivot a long-format result CSV on this metric first");
  plot->add_flag("--band", cfg.plot_bands, "shade +/- SE bands");
  plot->add_flag("--log-x", cfg.plot_log_x, "log-scale x axis");
  plot->add_flag("--log-y", cfg.plot_log_y, "log-scale y axis");
  plot->add_option("--title", cfg.plot_title, "chart title");
  plot->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    for (auto* sub : {sim, train, exp, bench, all, plot})
      if (app.got_subcommand(sub)) cfg.command = sub->get_name();
    if (cfg.task.empty()) {
      if (cfg.command == "simulate") cfg.task = "easy";
      if (cfg.command == "train") cfg.task = "linear";
    }
    // file first, then explicit key=value tokens override it
    std::vector<std::string> tokens = kv;
    kv.clear();
    if (!config_file.empty()) load_config_file(cfg, config_file, known);
    apply_kv_tokens(cfg, tokens, known);
  } catch (const CLI::CallForHelp& e) {
    out.exit_code = app.exit(e);
    return out;
  } catch (const CLI::CallForAllHelp& e) {
    out.exit_code = app.exit(e);
    return out;
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "gacl: %s\nRun with --help for usage.\n", e.what());
    out.exit_code = 2;
    return out;
  }

  if (cfg.out_dir.empty()) {
    if (const char* env = std::getenv("GACL_OUT"); env && *env)
      cfg.out_dir = env;
    else
      cfg.out_dir = "./out";
  }
  out.should_run = true;
  return out;
}

namespace {

namespace fs = std::filesystem;

double override_or(const CliConfig& cfg, const std::string& key, double dflt) {
  auto it = cfg.overrides.find(key);
  return it == cfg.overrides.end() ? dflt : it->second;
}

colony::ColonyConfig colony_from(const CliConfig& cfg) {
  colony::ColonyConfig c;
  auto as_int = [](double v) { return static_cast<int>(std::llround(v)); };
  c.n_ants = as_int(override_or(cfg, "colony.n_ants", c.n_ants));
  c.waves_per_gen =
      as_int(override_or(cfg, "colony.waves_per_gen", c.waves_per_gen));
  c.alpha = override_or(cfg, "colony.alpha", c.alpha);
  c.beta = override_or(cfg, "colony.beta", c.beta);
  c.gamma = override_or(cfg, "colony.gamma", c.gamma);
  c.rho_wave = override_or(cfg, "colony.rho_wave", c.rho_wave);
  c.rho_gen = override_or(cfg, "colony.rho_gen", c.rho_gen);
  c.explore_sigma = override_or(cfg, "colony.explore_sigma", c.explore_sigma);
  c.tau_min = override_or(cfg, "colony.tau_min", c.tau_min);
  if (cfg.overrides.count("colony.anneal_rho0") ||
      cfg.overrides.count("colony.anneal_tau"))
    c.anneal = colony::AnnealSchedule{
        override_or(cfg, "colony.anneal_rho0", 0.1),
        override_or(cfg, "colony.anneal_tau", 20.0)};
  return c;
}

int run_simulate(const CliConfig& cfg) {
  const auto tier = envtask::site_difficulty_from(cfg.task);
  auto env = colony::make_environment(envtask::site_qualities(tier),
                                      override_or(cfg, "env.obs_sigma", 0.05));
  const auto ccfg = colony_from(cfg);
  const int steps =
      static_cast<int>(std::llround(override_or(cfg, "exp.steps", 50)));
  RandomStream rng(cfg.seed);
  const auto traj = colony::run_gacl(env, ccfg, steps, rng);
  const auto fit = colony::fitness_series(traj);
  const auto err = colony::error_series(traj, env);

  std::string body =
      "experiment,condition,system,replicate,step,metric,value\n";
  auto row = [&](int step, const std::string& metric, double v) {
    body += "simulate," + cfg.task + ",gacl,0," + std::to_string(step) + "," +
            metric + "," + io::format_g9(v) + "\n";
  };
  for (int g = 0; g < steps; ++g) {
    row(g + 1, "fitness", fit[static_cast<std::size_t>(g)]);
    row(g + 1, "error", err[static_cast<std::size_t>(g)]);
    const auto& tau = traj[static_cast<std::size_t>(g)].tau_next;
    for (std::size_t j = 0; j < tau.size(); ++j)
      row(g + 1, "tau" + std::to_string(j), tau[j]);
  }
  const std::string path = cfg.out_dir + "/simulate.csv";
  io::write_file_atomic(path, body);
  std::printf("simulate %s: %d generations, final fitness %s, error %s -> %s\n",
              cfg.task.c_str(), steps, io::format_g9(fit.back()).c_str(),
              io::format_g9(err.back()).c_str(), path.c_str());
  return 0;
}

int run_train(const CliConfig& cfg) {
  const auto kind = envtask::synthetic_kind_from(cfg.task);
  neural::TrainConfig tc;
  auto as_int = [](double v) { return static_cast<int>(std::llround(v)); };
  tc.eta = override_or(cfg, "train.eta", tc.eta);
  tc.mu = override_or(cfg, "train.mu", tc.mu);
  tc.batch_size = as_int(override_or(cfg, "train.batch_size", tc.batch_size));
  tc.epochs = as_int(override_or(cfg, "train.epochs", 50));
  tc.decay_delta = override_or(cfg, "train.decay_delta", tc.decay_delta);
  const int hidden = as_int(override_or(cfg, "net.hidden", 16));
  const int n_points = as_int(override_or(cfg, "task.n_points", 200));
  const int n_val = as_int(override_or(cfg, "task.val_points", 200));
  const double noise = override_or(cfg, "task.noise", 0.0);

  RandomStream rng(cfg.seed);
  auto train_set =
      envtask::make_synthetic({kind, n_points, noise}, rng);
  auto val_set = envtask::make_synthetic({kind, n_val, 0.0}, rng);
  auto net = neural::mlp_init_fanin({2, hidden, 2}, rng);
  neural::TrainOptions opts;
  opts.x_val = &val_set.x;
  opts.y_val = &val_set.y;
  const auto recs =
      neural::train(net, train_set.x, train_set.y, tc, rng, opts);

  std::string body =
      "experiment,condition,system,replicate,step,metric,value\n";
  for (std::size_t e = 0; e < recs.size(); ++e) {
    auto row = [&](const std::string& metric, double v) {
      body += "train," + cfg.task + ",mlp,0," + std::to_string(e + 1) + "," +
              metric + "," + io::format_g9(v) + "\n";
    };
    row("loss", recs[e].loss);
    row("accuracy", recs[e].accuracy);
    row("grad_norm", recs[e].grad_norm);
    row("val_accuracy", recs[e].val_accuracy);
  }
  const std::string path = cfg.out_dir + "/train.csv";
  io::write_file_atomic(path, body);
  std::printf("train %s: %d epochs, final loss %s, val accuracy %s -> %s\n",
              cfg.task.c_str(), tc.epochs,
              io::format_g9(recs.back().loss).c_str(),
              io::format_g9(recs.back().val_accuracy).c_str(), path.c_str());
  return 0;
}

// Long-format -> wide: one column per (system, condition) series of the
// chosen metric, using "mean" rows (or replicate "0" for single-run series),
// plus matching _se columns from "se" rows.
io::Table pivot_long(const io::Table& t, const std::string& metric) {
  const auto c_cond = t.col("condition");
  const auto c_sys = t.col("system");
  const auto c_rep = t.col("replicate");
  const auto c_step = t.col("step");
  const auto c_metric = t.col("metric");
  const auto c_value = t.col("value");

  struct Series {
    std::map<double, std::string> mean, se;
  };
  std::map<std::string, Series> series;  // key = system:condition
  std::set<std::string> has_mean;
  std::set<double> steps;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (t.rows[r][c_metric] != metric) continue;
    const std::string key = t.rows[r][c_sys] + ":" + t.rows[r][c_cond];
    const std::string& rep = t.rows[r][c_rep];
    const double step = t.num(r, c_step);
    if (rep == "mean") {
      series[key].mean[step] = t.rows[r][c_value];
      has_mean.insert(key);
      steps.insert(step);
    } else if (rep == "se") {
      series[key].se[step] = t.rows[r][c_value];
    }
  }
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (t.rows[r][c_metric] != metric || t.rows[r][c_rep] != "0") continue;
    const std::string key = t.rows[r][c_sys] + ":" + t.rows[r][c_cond];
    if (has_mean.count(key)) continue;
    const double step = t.num(r, c_step);
    series[key].mean[step] = t.rows[r][c_value];
    steps.insert(step);
  }
  if (series.empty())
    throw io::IngestError("no '" + metric + "' series to pivot");

  io::Table wide;
  wide.columns.push_back("step");
  for (const auto& [key, s] : series) {
    wide.columns.push_back(key);
    if (!s.se.empty()) wide.columns.push_back(key + "_se");
  }
  for (double step : steps) {
    std::vector<std::string> row{io::format_g9(step)};
    for (const auto& [key, s] : series) {
      auto it = s.mean.find(step);
      row.push_back(it == s.mean.end() ? "nan" : it->second);
      if (!s.se.empty()) {
        auto se_it = s.se.find(step);
        row.push_back(se_it == s.se.end() ? "nan" : se_it->second);
      }
    }
    wide.rows.push_back(std::move(row));
  }
  return wide;
}

int run_plot(const CliConfig& cfg) {
  io::Table t = io::read_csv(cfg.plot_input);
  std::string x_col = cfg.plot_x;
  if (!cfg.plot_pivot_metric.empty()) {
    t = pivot_long(t, cfg.plot_pivot_metric);
    x_col = "step";
  }
  std::vector<std::string> ys = cfg.plot_y;
  if (ys.empty()) {
    for (const auto& c : t.columns)
      if (c != x_col && c.size() >= 3 && c.substr(c.size() - 3) != "_se")
        ys.push_back(c);
    if (ys.empty()) throw io::IngestError("no y columns to plot");
  }
  svg::PlotSpec ps;
  ps.title = cfg.plot_title;
  ps.x_label = x_col;
  ps.log_x = cfg.plot_log_x;
  ps.log_y = cfg.plot_log_y;
  ps.se_bands = cfg.plot_bands;
  svg::emit_svg(t, x_col, ys, cfg.plot_output, ps);
  std::printf("plot: %s -> %s (%zu series)\n", cfg.plot_input.c_str(),
              cfg.plot_output.c_str(), ys.size());
  return 0;
}

int run_experiments(const CliConfig& cfg,
                    const std::vector<std::string>& names) {
  std::vector<harness::ExperimentResult> results;
  double total = 0.0;
  for (const auto& name : names) {
    harness::ExperimentSpec spec;
    spec.name = name;
    spec.replicates = cfg.replicates;
    spec.master_seed = cfg.seed;
    spec.overrides = cfg.overrides;
    spec.data_dir = cfg.data_dir;
    auto res = harness::run_experiment(spec);
    const auto path = harness::write_csv(res, cfg.out_dir);
    total += res.wall_seconds;
    std::printf("%-20s %6zu rows  %6.1fs  verdicts %s  -> %s\n", name.c_str(),
                res.rows.size(), res.wall_seconds,
                harness::all_verdicts_pass(res) ? "PASS" : "FAIL",
                path.c_str());
    results.push_back(std::move(res));
  }
  harness::write_summary(results, cfg.seed, cfg.out_dir + "/summary.json");
  std::printf("total %.1fs, summary -> %s/summary.json\n", total,
              cfg.out_dir.c_str());
  return 0;
}

}  // namespace

int run(const CliConfig& cfg) {
  try {
    if (cfg.command != "plot") {
      std::error_code ec;
      fs::create_directories(cfg.out_dir, ec);
      if (ec)
        throw io::IngestError(cfg.out_dir + ": cannot create: " +
                              ec.message());
    }
    if (cfg.command == "simulate") return run_simulate(cfg);
    if (cfg.command == "train") return run_train(cfg);
    if (cfg.command == "plot") return run_plot(cfg);
    if (cfg.command == "experiment")
      return run_experiments(cfg, {cfg.experiment_name});
    if (cfg.command == "bench") return run_experiments(cfg, {"benchmark"});
    if (cfg.command == "all")
      return run_experiments(cfg, harness::experiment_names());
    throw std::logic_error("unhandled command: " + cfg.command);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "gacl: error: %s\n", e.what());
    return 1;
  }
}

int main_from(const std::vector<std::string>& args) {
  auto parsed = parse_args(args);
  return parsed.should_run ? run(parsed.cfg) : parsed.exit_code;
}

}  // namespace gacl::cli
