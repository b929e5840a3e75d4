#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gacl/colony.hpp"
#include "gacl/envtask.hpp"
#include "gacl/harness.hpp"
#include "gacl/neural.hpp"
#include "gacl/rng.hpp"

namespace py = pybind11;
using namespace gacl;

namespace {

colony::ColonyConfig config_from(const std::map<std::string, double>& kv) {
  colony::ColonyConfig c;
  auto as_int = [](double v) { return static_cast<int>(std::llround(v)); };
  for (const auto& [k, v] : kv) {
    if (k == "n_ants") c.n_ants = as_int(v);
    else if (k == "waves_per_gen") c.waves_per_gen = as_int(v);
    else if (k == "alpha") c.alpha = v;
    else if (k == "beta") c.beta = v;
    else if (k == "gamma") c.gamma = v;
    else if (k == "rho_wave") c.rho_wave = v;
    else if (k == "rho_gen") c.rho_gen = v;
    else if (k == "explore_sigma") c.explore_sigma = v;
    else if (k == "tau_min") c.tau_min = v;
    else throw std::invalid_argument("unknown colony config key: " + k);
  }
  return c;
}

py::dict run_colony(std::vector<double> qualities, double obs_sigma,
                    std::optional<std::vector<double>> desirabilities,
                    int generations, std::uint64_t seed,
                    const std::map<std::string, double>& config,
                    std::optional<std::vector<double>> tau0) {
  auto env = desirabilities
                 ? colony::make_environment(std::move(qualities),
                                            std::move(*desirabilities),
                                            obs_sigma)
                 : colony::make_environment(std::move(qualities), obs_sigma);
  const auto cfg = config_from(config);
  RandomStream rng(seed);
  std::optional<colony::PheromoneField> start;
  if (tau0) start = std::move(*tau0);
  const auto traj = colony::run_gacl(env, cfg, generations, rng, start);

  py::dict out;
  out["fitness"] = colony::fitness_series(traj);
  out["error"] = colony::error_series(traj, env);
  out["allocation_quality"] = colony::allocation_quality_series(traj, env);
  std::vector<std::vector<double>> tau;
  std::vector<std::vector<long long>> visits;
  for (const auto& rec : traj) {
    tau.push_back(rec.tau_next);
    visits.push_back(rec.outcome.visit_counts);
  }
  out["tau"] = tau;
  out["visits"] = visits;
  return out;
}

py::dict train_mlp(const neural::Matrix& x, const std::vector<int>& y,
                   std::vector<int> dims, double eta, double mu,
                   int batch_size, int epochs, double decay_delta,
                   std::uint64_t seed,
                   std::optional<neural::Matrix> x_val,
                   std::optional<std::vector<int>> y_val) {
  neural::TrainConfig cfg;
  cfg.eta = eta;
  cfg.mu = mu;
  cfg.batch_size = batch_size;
  cfg.epochs = epochs;
  cfg.decay_delta = decay_delta;
  RandomStream rng(seed);
  auto net = neural::mlp_init_fanin(dims, rng);
  neural::TrainOptions opts;
  if (x_val && y_val) {
    opts.x_val = &*x_val;
    opts.y_val = &*y_val;
  }
  const auto recs = neural::train(net, x, y, cfg, rng, opts);

  py::dict out;
  std::vector<double> loss, acc, gnorm, val;
  for (const auto& r : recs) {
    loss.push_back(r.loss);
    acc.push_back(r.accuracy);
    gnorm.push_back(r.grad_norm);
    val.push_back(r.val_accuracy);
  }
  out["loss"] = loss;
  out["accuracy"] = acc;
  out["grad_norm"] = gnorm;
  out["val_accuracy"] = val;
  std::vector<int> preds;
  const auto& px = (x_val && y_val) ? *x_val : x;
  for (const auto& row : px) preds.push_back(neural::predict(net, row));
  out["predictions"] = preds;
  return out;
}

std::string run_experiment_json(const std::string& name, std::uint64_t seed,
                                int replicates,
                                const std::map<std::string, double>& overrides,
                                const std::string& data_dir,
                                const std::string& csv_out_dir) {
  harness::ExperimentSpec spec;
  spec.name = name;
  spec.master_seed = seed;
  spec.replicates = replicates;
  spec.overrides = overrides;
  spec.data_dir = data_dir;
  auto res = harness::run_experiment(spec);
  if (!csv_out_dir.empty()) harness::write_csv(res, csv_out_dir);
  harness::json doc;
  doc["name"] = res.name;
  doc["rows"] = res.rows.size();
  doc["meta"] = res.meta;
  doc["all_verdicts_pass"] = harness::all_verdicts_pass(res);
  return doc.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Colony-learning / neural-network workbench core";
  m.attr("__version__") = "0.1.0";

  m.def("run_colony", &run_colony, py::arg("qualities"),
        py::arg("obs_sigma") = 0.0, py::arg("desirabilities") = py::none(),
        py::arg("generations") = 50, py::arg("seed") = 42,
        py::arg("config") = std::map<std::string, double>{},
        py::arg("tau0") = py::none(),
        "Run one seeded colony trajectory; returns per-generation series.");

  m.def("choice_probabilities",
        [](const std::vector<double>& tau, std::vector<double> qualities,
           std::optional<std::vector<double>> desirabilities, double alpha,
           double beta) {
          auto env = desirabilities
                         ? colony::make_environment(std::move(qualities),
                                                    std::move(*desirabilities),
                                                    0.0)
                         : colony::make_environment(std::move(qualities), 0.0);
          return colony::choice_probabilities(tau, env, alpha, beta);
        },
        py::arg("tau"), py::arg("qualities"),
        py::arg("desirabilities") = py::none(), py::arg("alpha") = 1.0,
        py::arg("beta") = 0.0);

  m.def("expected_fitness",
        [](const std::vector<double>& tau, std::vector<double> qualities,
           double alpha, double beta) {
          auto env = colony::make_environment(std::move(qualities), 0.0);
          return colony::expected_fitness(tau, env, alpha, beta);
        },
        py::arg("tau"), py::arg("qualities"), py::arg("alpha") = 1.0,
        py::arg("beta") = 0.0);

  m.def("train_mlp", &train_mlp, py::arg("x"), py::arg("y"), py::arg("dims"),
        py::arg("eta") = 0.1, py::arg("mu") = 0.0, py::arg("batch_size") = 16,
        py::arg("epochs") = 50, py::arg("decay_delta") = 0.0,
        py::arg("seed") = 42, py::arg("x_val") = py::none(),
        py::arg("y_val") = py::none(),
        "Train a tanh/softmax net with SGD; returns per-epoch series.");

  m.def("run_experiment_json", &run_experiment_json, py::arg("name"),
        py::arg("seed") = 42, py::arg("replicates") = 0,
        py::arg("overrides") = std::map<std::string, double>{},
        py::arg("data_dir") = std::string(),
        py::arg("csv_out_dir") = std::string(),
        "Run a named experiment; returns its metadata as a JSON string.");

  m.def("experiment_names", &harness::experiment_names);
  m.def("dataset_names", &envtask::dataset_names);
}
