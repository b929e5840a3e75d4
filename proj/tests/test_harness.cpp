#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gacl/harness.hpp"
#include "gacl/io.hpp"

namespace fs = std::filesystem;
using namespace gacl;
using harness::ExperimentResult;
using harness::ExperimentSpec;
using harness::Row;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("gacl_test_" + tag)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

bool rows_equal(const std::vector<Row>& a, const std::vector<Row>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].condition != b[i].condition || a[i].system != b[i].system ||
        a[i].replicate != b[i].replicate || a[i].step != b[i].step ||
        a[i].metric != b[i].metric || a[i].value != b[i].value)
      return false;
  }
  return true;
}

ExperimentSpec cheap_traces_spec(std::uint64_t seed = 42) {
  ExperimentSpec spec;
  spec.name = "traces";
  spec.replicates = 2;
  spec.master_seed = seed;
  spec.overrides = {{"exp.steps", 12}, {"colony.n_ants", 20}};
  return spec;
}

}  // namespace

TEST_CASE("experiment_names lists the eleven experiments") {
  CHECK(harness::experiment_names() ==
        std::vector<std::string>{"iso-curve", "traces", "grad-dynamics",
                                 "uniform-convergence", "trajectory-spread",
                                 "lr-sweep", "complexity", "adaptation",
                                 "noise", "benchmark", "mean-field"});
}

TEST_CASE("run_experiment rejects bad names, counts, and override keys") {
  ExperimentSpec spec;
  spec.name = "warp";
  CHECK_THROWS_WITH_AS(harness::run_experiment(spec),
                       doctest::Contains("warp"), std::invalid_argument);

  spec.name = "traces";
  spec.replicates = 1;
  CHECK_THROWS_WITH_AS(harness::run_experiment(spec),
                       doctest::Contains("replicates"), std::invalid_argument);

  spec = cheap_traces_spec();
  spec.overrides["colony.bogus"] = 1.0;
  CHECK_THROWS_WITH_AS(harness::run_experiment(spec),
                       doctest::Contains("colony.bogus"),
                       std::invalid_argument);
}

TEST_CASE("every advertised override key is applicable") {
  const std::map<std::string, double> sane = {
      {"colony.n_ants", 20},        {"colony.waves_per_gen", 2},
      {"colony.alpha", 1.0},        {"colony.beta", 0.5},
      {"colony.gamma", 0.1},        {"colony.rho_wave", 0.1},
      {"colony.rho_gen", 0.1},      {"colony.explore_sigma", 0.01},
      {"colony.tau_min", 1e-6},     {"colony.anneal_rho0", 0.1},
      {"colony.anneal_tau", 20.0},  {"env.obs_sigma", 0.05},
      {"train.eta", 0.1},           {"train.mu", 0.0},
      {"train.batch_size", 8},      {"train.epochs", 5},
      {"train.decay_delta", 0.0},   {"net.hidden", 6},
      {"task.n_points", 50},        {"task.noise", 0.1},
      {"task.val_points", 50},      {"exp.steps", 10},
      {"exp.threshold", 0.9},       {"exp.shift_step", 5},
      {"classifier.generations", 3}, {"classifier.obs_sigma", 0.05}};

  // The advertised list and the sane-value table must agree exactly, so a
  // key added to one side shows up here.
  const auto keys = harness::known_override_keys();
  CHECK(keys.size() == sane.size());
  for (const auto& k : keys) {
    INFO("key: ", k);
    CHECK(sane.count(k) == 1);
  }

  ExperimentSpec spec;
  spec.name = "traces";
  spec.replicates = 2;
  spec.overrides = sane;
  const auto res = harness::run_experiment(spec);
  CHECK(res.name == "traces");
  CHECK(!res.rows.empty());
}

TEST_CASE("replicate labels are indices plus mean/sd/se aggregates") {
  ExperimentSpec spec;
  spec.name = "iso-curve";
  spec.replicates = 3;
  const auto res = harness::run_experiment(spec);

  std::set<std::string> labels;
  for (const auto& r : res.rows) labels.insert(r.replicate);
  CHECK(labels ==
        std::set<std::string>{"0", "1", "2", "mean", "sd", "se"});

  // Aggregate means must sit inside the per-replicate envelope at every
  // (condition, system, metric, step).
  struct Cell {
    double lo = 1e300, hi = -1e300, mean = 0.0;
    bool has_mean = false;
  };
  std::map<std::string, Cell> cells;
  auto key = [](const Row& r) {
    std::ostringstream k;
    k << r.condition << '|' << r.system << '|' << r.metric << '|' << r.step;
    return k.str();
  };
  for (const auto& r : res.rows) {
    auto& c = cells[key(r)];
    if (r.replicate == "mean") {
      c.mean = r.value;
      c.has_mean = true;
    } else if (r.replicate != "sd" && r.replicate != "se") {
      c.lo = std::min(c.lo, r.value);
      c.hi = std::max(c.hi, r.value);
    }
  }
  std::size_t checked = 0;
  for (const auto& [k, c] : cells) {
    if (!c.has_mean) continue;
    INFO("cell: ", k);
    CHECK(c.mean >= c.lo - 1e-12);
    CHECK(c.mean <= c.hi + 1e-12);
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("run_experiment is deterministic in the master seed") {
  const auto a = harness::run_experiment(cheap_traces_spec(42));
  const auto b = harness::run_experiment(cheap_traces_spec(42));
  CHECK(rows_equal(a.rows, b.rows));
  CHECK(a.meta == b.meta);

  const auto c = harness::run_experiment(cheap_traces_spec(43));
  CHECK(!rows_equal(a.rows, c.rows));
}

TEST_CASE("uniform-convergence exponent is stable across disjoint seeds") {
  ExperimentSpec spec;
  spec.name = "uniform-convergence";
  spec.master_seed = 42;
  const auto a = harness::run_experiment(spec);
  spec.master_seed = 43;
  const auto b = harness::run_experiment(spec);
  const double ea = a.meta["fit"]["exponent"].get<double>();
  const double eb = b.meta["fit"]["exponent"].get<double>();
  CHECK(std::abs(ea - eb) < 0.3);
  CHECK(a.meta["fit"]["r_squared"].get<double>() >= 0.85);
  CHECK(b.meta["fit"]["r_squared"].get<double>() >= 0.85);
}

TEST_CASE("write_csv emits the long schema with 9-digit values") {
  const auto res = harness::run_experiment(cheap_traces_spec());
  TempDir dir("harness_csv");
  const auto path = harness::write_csv(res, dir.str());
  CHECK(path == dir.str() + "/traces.csv");

  const auto body = io::read_text_file(path);
  std::istringstream in(body);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "experiment,condition,system,replicate,step,metric,value");

  std::size_t n = 0;
  while (std::getline(in, line)) {
    REQUIRE(line.rfind("traces,", 0) == 0);
    ++n;
  }
  CHECK(n == res.rows.size());

  // First data line matches the in-memory row rendered with format_g9.
  const auto& r0 = res.rows[0];
  const std::string want = "traces," + r0.condition + "," + r0.system + "," +
                           r0.replicate + "," + io::format_g9(r0.step) + "," +
                           r0.metric + "," + io::format_g9(r0.value);
  std::istringstream again(body);
  std::getline(again, line);
  std::getline(again, line);
  CHECK(line == want);
}

TEST_CASE("write_summary keys metas by experiment and omits wall time") {
  ExperimentResult a;
  a.name = "alpha";
  a.meta = {{"x", 1}, {"verdicts", {{"ok", true}}}};
  a.wall_seconds = 1.25;
  ExperimentResult b;
  b.name = "beta";
  b.meta = {{"y", 2.5}};
  b.wall_seconds = 9.75;

  TempDir dir("harness_summary");
  const std::string path = dir.str() + "/summary.json";
  harness::write_summary({a, b}, 7, path);
  const auto body = io::read_text_file(path);
  CHECK(body.find("wall") == std::string::npos);

  const auto doc = harness::json::parse(body);
  CHECK(doc["master_seed"] == 7);
  CHECK(doc["experiments"]["alpha"]["x"] == 1);
  CHECK(doc["experiments"]["alpha"]["verdicts"]["ok"] == true);
  CHECK(doc["experiments"]["beta"]["y"] == 2.5);
}

TEST_CASE("all_verdicts_pass scans the verdict block") {
  ExperimentResult res;
  res.meta = {{"other", 1}};
  CHECK(harness::all_verdicts_pass(res));
  res.meta["verdicts"] = {{"a", true}, {"b", true}};
  CHECK(harness::all_verdicts_pass(res));
  res.meta["verdicts"]["b"] = false;
  CHECK(!harness::all_verdicts_pass(res));
}
