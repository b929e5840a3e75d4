// Acceptance gate for the workbench: one pass/fail line per criterion,
// nonzero exit if any criterion fails. Each criterion also carries a wall
// time budget that counts toward the verdict.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "gacl/colony.hpp"
#include "gacl/envtask.hpp"
#include "gacl/harness.hpp"
#include "gacl/io.hpp"
#include "gacl/metrics.hpp"
#include "gacl/neural.hpp"
#include "gacl/rng.hpp"

namespace fs = std::filesystem;
using namespace gacl;

namespace {

int g_failures = 0;

void report(int num, const std::string& label, bool pass, double seconds,
            double budget, const std::string& detail) {
  if (seconds >= budget) pass = false;
  if (!pass) ++g_failures;
  std::printf("[%s] %2d. %-52s %7.2fs / %4.0fs  %s\n", pass ? "PASS" : "FAIL",
              num, label.c_str(), seconds, budget, detail.c_str());
  std::fflush(stdout);
}

template <typename Fn>
void criterion(int num, const std::string& label, double budget, Fn&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = false;
  std::string detail;
  try {
    pass = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  report(num, label, pass, secs, budget, detail);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

harness::ExperimentResult run_default(const std::string& name) {
  harness::ExperimentSpec spec;
  spec.name = name;
  spec.master_seed = 42;
  return harness::run_experiment(spec);
}

// --- criterion 1 ----------------------------------------------------------

double worst_grad_error() {
  RandomStream rng(42);
  const std::vector<std::vector<int>> archs{{2, 8, 2}, {4, 16, 3},
                                            {3, 12, 8, 2}};
  const double h = 1e-6;
  double worst = 0.0;
  for (const auto& dims : archs) {
    for (int rep = 0; rep < 10; ++rep) {
      auto net = neural::mlp_init(dims, 0.8, rng);
      std::vector<double> x(static_cast<std::size_t>(dims.front()));
      for (auto& v : x) v = rng.uniform(-2.0, 2.0);
      const int label = static_cast<int>(
          rng.uniform_int(static_cast<std::uint64_t>(dims.back())));
      const auto analytic = neural::backward(net, neural::forward(net, x),
                                             label);
      auto loss_at = [&] {
        return neural::loss(neural::forward(net, x).probs, label);
      };
      auto fd_check = [&](double& param, double a) {
        const double keep = param;
        param = keep + h;
        const double up = loss_at();
        param = keep - h;
        const double dn = loss_at();
        param = keep;
        const double f = (up - dn) / (2.0 * h);
        const double rel =
            std::abs(a - f) / std::max({std::abs(a), std::abs(f), 1e-4});
        worst = std::max(worst, rel);
      };
      for (std::size_t l = 0; l < net.w.size(); ++l) {
        for (std::size_t i = 0; i < net.w[l].size(); ++i)
          fd_check(net.w[l][i], analytic.dw[l][i]);
        for (std::size_t i = 0; i < net.b[l].size(); ++i)
          fd_check(net.b[l][i], analytic.db[l][i]);
      }
    }
  }
  return worst;
}

// --- criterion 2 ----------------------------------------------------------

bool normalization_suite(std::string& detail) {
  RandomStream rng(7);
  double worst_colony = 0.0, worst_net = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto k = static_cast<std::size_t>(2 + rng.uniform_int(7));
    std::vector<double> tau(k), des(k);
    for (auto& v : tau) v = rng.uniform(1e-3, 5.0);
    for (auto& v : des) v = rng.uniform(0.1, 3.0);
    const double alpha = rng.uniform(0.0, 3.0);
    const double beta = rng.uniform(0.0, 2.0);
    auto env = colony::make_environment(std::vector<double>(k, 0.5),
                                        std::move(des), 0.0);
    const auto p = colony::choice_probabilities(tau, env, alpha, beta);
    double s = 0.0;
    for (double v : p) s += v;
    worst_colony = std::max(worst_colony, std::abs(s - 1.0));
  }
  for (int i = 0; i < 10000; ++i) {
    const int out = 2 + static_cast<int>(rng.uniform_int(5));
    auto net = neural::mlp_init({4, 8, out}, 1.5, rng);
    std::vector<double> x(4);
    for (auto& v : x) v = rng.uniform(-3.0, 3.0);
    const auto pass = neural::forward(net, x);
    double s = 0.0;
    for (double v : pass.probs) s += v;
    worst_net = std::max(worst_net, std::abs(s - 1.0));
  }

  bool floor_ok = true;
  for (int i = 0; i < 10000 && floor_ok; ++i) {
    const auto k = static_cast<std::size_t>(2 + rng.uniform_int(5));
    colony::ColonyConfig cfg;
    cfg.gamma = rng.uniform(1e-3, 1.0);
    cfg.rho_wave = rng.uniform(0.0, 1.0);
    cfg.rho_gen = rng.uniform(0.0, 1.0);
    cfg.explore_sigma = rng.uniform(0.0, 0.2);
    cfg.tau_min = std::pow(10.0, rng.uniform(-9.0, -3.0));
    std::vector<double> tau(k);
    for (auto& v : tau) v = rng.uniform(cfg.tau_min, 3.0);
    if (i % 2 == 0) {
      std::vector<double> dep(k);
      for (auto& v : dep) v = rng.uniform(0.0, 2.0);
      const auto next = colony::wave_update(tau, dep, cfg);
      for (double v : next) floor_ok = floor_ok && v >= cfg.tau_min;
    } else {
      colony::GenerationOutcome out;
      out.tau_end = tau;
      out.contribution.resize(k);
      double f = 0.0;
      for (auto& v : out.contribution) {
        v = rng.uniform(0.0, 1.0);
        f += v;
      }
      out.fitness = f;
      out.visit_counts.assign(k, 1);
      const auto next = colony::generation_update(
          out, cfg, 1 + static_cast<int>(rng.uniform_int(50)), rng);
      for (double v : next) floor_ok = floor_ok && v >= cfg.tau_min;
    }
  }
  detail = fmt("sum errors: colony %.2e, net %.2e", worst_colony, worst_net) +
           (floor_ok ? "" : "; floor violated");
  return worst_colony <= 1e-12 && worst_net <= 1e-12 && floor_ok;
}

// --- criterion 11 ---------------------------------------------------------

int run_all(const std::string& out_dir) {
  const std::string cmd = std::string(GACL_BIN_PATH) + " all --seed 42 --out " +
                          out_dir + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  if (st == -1) return -1;
  return WIFEXITED(st) ? WEXITSTATUS(st) : -2;
}

bool dirs_identical(const fs::path& a, const fs::path& b, std::string& why) {
  std::vector<fs::path> rel;
  for (const auto& e : fs::recursive_directory_iterator(a))
    if (e.is_regular_file()) rel.push_back(fs::relative(e.path(), a));
  std::sort(rel.begin(), rel.end());
  std::size_t b_files = 0;
  for (const auto& e : fs::recursive_directory_iterator(b))
    if (e.is_regular_file()) ++b_files;
  if (b_files != rel.size()) {
    why = "file counts differ";
    return false;
  }
  for (const auto& r : rel) {
    if (!fs::exists(b / r)) {
      why = r.string() + " missing in second run";
      return false;
    }
    if (io::read_text_file((a / r).string()) !=
        io::read_text_file((b / r).string())) {
      why = r.string() + " differs";
      return false;
    }
  }
  return true;
}

}  // namespace

int main() {
  std::printf("acceptance gate (11 criteria)\n");

  criterion(1, "backpropagation matches finite differences", 5.0,
            [](std::string& d) {
              const double worst = worst_grad_error();
              d = fmt("max rel err %.2e (< 1e-5)", worst);
              return worst < 1e-5;
            });

  criterion(2, "probability normalization and pheromone floor", 10.0,
            normalization_suite);

  criterion(3, "reinforcement tracks the fitness gradient", 30.0,
            [](std::string& d) {
              auto env = colony::make_environment({1.0, 0.6, 0.2}, 0.0);
              colony::ColonyConfig cfg;
              RandomStream rng(42);
              const auto chk = colony::fitness_gradient_mc(
                  env, {1.0, 1.0, 1.0}, cfg, 100000, 1e-4, rng);
              d = fmt("cosine %.4f (>= 0.9)", chk.cosine);
              return chk.cosine >= 0.9;
            });

  criterion(4, "trajectory variance decays as a power of N", 180.0,
            [](std::string& d) {
              const auto res = run_default("uniform-convergence");
              const double e = res.meta["fit"]["exponent"].get<double>();
              const double r2 = res.meta["fit"]["r_squared"].get<double>();
              d = fmt("exponent %.3f in [-2,-0.8], R^2 %.3f >= 0.85", e, r2);
              return e >= -2.0 && e <= -0.8 && r2 >= 0.85;
            });

  criterion(5, "large colonies track the mean-field ODE", 120.0,
            [](std::string& d) {
              const auto res = run_default("mean-field");
              const double d100 =
                  res.meta["sup_distance"]["N=100"].get<double>();
              const double d1000 =
                  res.meta["sup_distance"]["N=1000"].get<double>();
              const double resid =
                  res.meta["fixed_point_residual"].get<double>();
              d = fmt("sup d(1000)=%.4f < 2 x d(100)=%.4f, residual %.1e",
                      d1000, d100, resid);
              return d1000 < 2.0 * d100 && resid < 1e-6;
            });

  criterion(6, "learning-rate response is an inverted U", 180.0,
            [](std::string& d) {
              const auto res = run_default("lr-sweep");
              bool ok = true;
              for (const char* sys : {"gacl_mean", "mlp_mean"}) {
                const auto curve =
                    res.meta[sys].get<std::vector<double>>();
                const auto norm = metrics::normalize_minmax(curve);
                const auto am = static_cast<std::size_t>(
                    std::max_element(norm.begin(), norm.end()) - norm.begin());
                const bool interior = am > 0 && am + 1 < norm.size();
                const bool ends = norm.front() <= norm[am] - 0.05 &&
                                  norm.back() <= norm[am] - 0.05;
                ok = ok && interior && ends;
              }
              d = ok ? "interior peaks, endpoints <= peak - 0.05 (both)"
                     : "peak at a grid edge or endpoints too high";
              return ok;
            });

  criterion(7, "both systems recover from the mid-run shift", 120.0,
            [](std::string& d) {
              const auto res = run_default("adaptation");
              bool ok = true;
              for (const char* sys : {"gacl", "mlp"}) {
                const auto& sh = res.meta[sys]["shift"];
                const auto& ct = res.meta[sys]["control"];
                const double plateau = sh["plateau"].get<double>();
                const double trough = sh["trough"].get<double>();
                const double fin = sh["final"].get<double>();
                ok = ok && trough <= plateau - 0.1;
                ok = ok && fin >= 0.8 * plateau;
                ok = ok && std::abs(ct["trough"].get<double>() -
                                    ct["plateau"].get<double>()) <= 0.05;
              }
              d = ok ? "trough >= 0.1 below plateau, recovery >= 80%, "
                       "control flat"
                     : "shift response out of band";
              return ok;
            });

  criterion(8, "performance decays with observation noise", 120.0,
            [](std::string& d) {
              const auto res = run_default("noise");
              const double sg = res.meta["spearman_gacl"].get<double>();
              const double sm = res.meta["spearman_mlp"].get<double>();
              const double r2 =
                  res.meta["gacl_fit"]["r_squared"].get<double>();
              d = fmt("spearman %.3f / %.3f (<= -0.8), decay R^2 %.3f", sg, sm,
                      r2);
              return sg <= -0.8 && sm <= -0.8 && r2 >= 0.7;
            });

  criterion(9, "harder tiers take strictly longer to threshold", 180.0,
            [](std::string& d) {
              const auto res = run_default("complexity");
              const auto& m = res.meta["median_steps"];
              const double ge = m["gacl:easy"].get<double>();
              const double gm = m["gacl:moderate"].get<double>();
              const double gs = m["gacl:subtle"].get<double>();
              const double ml = m["mlp:linear"].get<double>();
              const double mq = m["mlp:quadratic"].get<double>();
              const double mc = m["mlp:complex"].get<double>();
              d = fmt("gacl %g < %g < %g", ge, gm, gs) +
                  fmt(", mlp %g < %g < %g", ml, mq, mc);
              return ge < gm && gm < gs && ml < mq && mq < mc;
            });

  criterion(10, "benchmark accuracy bands", 180.0, [](std::string& d) {
    const auto res = run_default("benchmark");
    const auto& table = res.meta["table"];
    bool ok = true;
    for (const char* sys : {"mlp", "gacl", "colony-net"}) {
      ok = ok && table["iris-easy"][sys]["mean"].get<double>() == 1.0;
      ok = ok && table["iris-easy"][sys]["sd"].get<double>() == 0.0;
    }
    const double hard_mlp = table["iris-hard"]["mlp"]["mean"].get<double>();
    ok = ok && hard_mlp >= 0.77 && hard_mlp <= 1.0;
    const double usa_gacl = table["usarrests"]["gacl"]["mean"].get<double>();
    ok = ok && usa_gacl >= 0.75;
    for (const auto& name : envtask::dataset_names()) {
      const double floor_v =
          std::min(table[name]["mlp"]["mean"].get<double>(),
                   table[name]["gacl"]["mean"].get<double>()) -
          0.05;
      ok = ok && table[name]["colony-net"]["mean"].get<double>() >= floor_v;
    }
    d = fmt("iris-hard mlp %.3f, usarrests gacl %.3f", hard_mlp, usa_gacl);
    return ok;
  });

  criterion(11, "reruns are byte-identical inside the budget", 1000.0,
            [](std::string& d) {
              const fs::path base = fs::temp_directory_path();
              const fs::path a = base / "gacl_accept_a";
              const fs::path b = base / "gacl_accept_b";
              fs::remove_all(a);
              fs::remove_all(b);
              const auto t0 = std::chrono::steady_clock::now();
              if (run_all(a.string()) != 0) {
                d = "first run failed";
                return false;
              }
              const double wall = std::chrono::duration<double>(
                                      std::chrono::steady_clock::now() - t0)
                                      .count();
              if (run_all(b.string()) != 0) {
                d = "second run failed";
                return false;
              }
              std::string why;
              const bool same = dirs_identical(a, b, why);
              fs::remove_all(a);
              fs::remove_all(b);
              d = same ? fmt("identical outputs, full run %.1fs (< 900s)",
                             wall)
                       : why;
              return same && wall < 900.0;
            });

  if (g_failures == 0) {
    std::printf("acceptance: 11/11 criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criteria FAILED\n", g_failures);
  return 1;
}
