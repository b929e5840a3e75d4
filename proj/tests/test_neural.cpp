#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "gacl/envtask.hpp"
#include "gacl/neural.hpp"
#include "gacl/rng.hpp"

using namespace gacl;
using namespace gacl::neural;

namespace {

// Max relative error between analytic and finite-difference gradients with
// a denominator floor, so coordinates that are legitimately ~0 are judged
// absolutely instead of amplifying FD round-off.
double grad_check(const std::vector<int>& dims, RandomStream& rng) {
  Mlp mlp = mlp_init(dims, 0.8, rng);
  std::vector<double> x(static_cast<std::size_t>(dims.front()));
  for (auto& v : x) v = rng.uniform(-1.0, 1.0);
  const int label = static_cast<int>(rng.uniform_int(
      static_cast<std::uint64_t>(dims.back())));

  const auto pass = forward(mlp, x);
  const auto g = backward(mlp, pass, label);

  const double h = 1e-6;
  double worst = 0.0;
  auto check_param = [&](double& slot, double analytic) {
    const double keep = slot;
    slot = keep + h;
    const double up = loss(forward(mlp, x).probs, label);
    slot = keep - h;
    const double dn = loss(forward(mlp, x).probs, label);
    slot = keep;
    const double fd = (up - dn) / (2.0 * h);
    const double rel =
        std::abs(analytic - fd) / std::max({std::abs(analytic),
                                            std::abs(fd), 1e-4});
    worst = std::max(worst, rel);
  };
  for (std::size_t l = 0; l < mlp.n_layers(); ++l) {
    for (std::size_t i = 0; i < mlp.w[l].size(); ++i)
      check_param(mlp.w[l][i], g.dw[l][i]);
    for (std::size_t i = 0; i < mlp.b[l].size(); ++i)
      check_param(mlp.b[l][i], g.db[l][i]);
  }
  return worst;
}

envtask::PointSet linear_points(int n, RandomStream& rng) {
  envtask::SyntheticTask task;
  task.kind = envtask::SyntheticKind::Linear;
  task.n_points = n;
  return envtask::make_synthetic(task, rng);
}

}  // namespace

TEST_CASE("init produces the right shapes and scales") {
  RandomStream rng(1);
  const std::vector<int> dims{3, 8, 2};
  const Mlp m = mlp_init(dims, 0.5, rng);
  REQUIRE(m.n_layers() == 2);
  CHECK(m.w[0].size() == 8 * 3);
  CHECK(m.w[1].size() == 2 * 8);
  CHECK(m.b[0].size() == 8);
  CHECK(m.b[1].size() == 2);
  for (const auto& layer : m.w)
    for (double v : layer) CHECK(std::abs(v) <= 0.5);
  for (const auto& layer : m.b)
    for (double v : layer) CHECK(v == 0.0);

  const Mlp f = mlp_init_fanin(dims, rng);
  for (double v : f.w[0]) CHECK(std::abs(v) <= 0.5 / std::sqrt(3.0));
  for (double v : f.w[1]) CHECK(std::abs(v) <= 0.5 / std::sqrt(8.0));
}

TEST_CASE("forward pass: softmax normalization and a hand-checked net") {
  RandomStream rng(2);
  Mlp m = mlp_init({2, 4, 3}, 0.7, rng);
  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<double> x{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const auto pass = forward(m, x);
    REQUIRE(pass.probs.size() == 3);
    double sum = 0.0;
    for (double p : pass.probs) {
      CHECK(p >= 0.0);
      sum += p;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }

  // 1-1-2 net computed by hand: hidden = tanh(2*0.5+0) = tanh(1);
  // logits = (1*h, -1*h); softmax.
  Mlp tiny;
  tiny.dims = {1, 1, 2};
  tiny.w = {{0.5}, {1.0, -1.0}};
  tiny.b = {{0.0}, {0.0, 0.0}};
  const auto pass = forward(tiny, {2.0});
  const double hval = std::tanh(1.0);
  CHECK(pass.acts[1][0] == doctest::Approx(hval));
  const double z = std::exp(hval) + std::exp(-hval);
  CHECK(pass.probs[0] == doctest::Approx(std::exp(hval) / z));
  CHECK(pass.probs[1] == doctest::Approx(std::exp(-hval) / z));
}

TEST_CASE("loss is cross entropy with a floor") {
  CHECK(loss({0.25, 0.75}, 1) == doctest::Approx(-std::log(0.75)));
  CHECK(loss({1.0, 0.0}, 1) == doctest::Approx(-std::log(1e-12)));
}

TEST_CASE("backward matches finite differences on three architectures") {
  RandomStream rng(42);
  double worst = 0.0;
  for (const auto& dims :
       {std::vector<int>{2, 8, 2}, std::vector<int>{4, 16, 3},
        std::vector<int>{3, 12, 8, 2}}) {
    for (int i = 0; i < 10; ++i)
      worst = std::max(worst, grad_check(dims, rng));
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("sgd_step applies momentum and decay by hand") {
  Mlp m;
  m.dims = {1, 1};
  m.w = {{1.0}};
  m.b = {{0.5}};
  Gradients g;
  g.dw = {{0.2}};
  g.db = {{-0.4}};
  Gradients vel = zeros_like(m);
  vel.dw[0][0] = 0.1;
  vel.db[0][0] = 0.0;

  TrainConfig cfg;
  cfg.eta = 0.5;
  cfg.mu = 0.9;
  cfg.decay_delta = 0.01;
  sgd_step(m, g, vel, cfg);

  const double vw = 0.9 * 0.1 - 0.5 * 0.2;  // -0.01
  CHECK(vel.dw[0][0] == doctest::Approx(vw));
  CHECK(m.w[0][0] == doctest::Approx(0.99 * 1.0 + vw));
  const double vb = -0.5 * (-0.4);
  CHECK(m.b[0][0] == doctest::Approx(0.5 + vb));  // no decay on biases

  g.dw[0][0] = std::nan("");
  CHECK_THROWS_AS(sgd_step(m, g, vel, cfg), TrainingDiverged);
}

TEST_CASE("eta = 0 leaves the weights untouched and the loss flat") {
  RandomStream rng(3);
  auto pts = linear_points(64, rng);
  Mlp m = mlp_init_fanin({2, 8, 2}, rng);
  const Mlp before = m;
  TrainConfig cfg;
  cfg.eta = 0.0;
  cfg.epochs = 5;
  const auto recs = train(m, pts.x, pts.y, cfg, rng);
  REQUIRE(recs.size() == 5);
  for (std::size_t l = 0; l < m.w.size(); ++l) {
    CHECK(m.w[l] == before.w[l]);
    CHECK(m.b[l] == before.b[l]);
  }
  // Per-epoch loss sums the same terms in shuffled order, so it is
  // constant only up to summation reordering.
  for (const auto& r : recs)
    CHECK(r.loss == doctest::Approx(recs[0].loss).epsilon(1e-12));
  for (const auto& r : recs) CHECK(r.accuracy == recs[0].accuracy);
}

TEST_CASE("full-batch descent decreases the loss monotonically") {
  RandomStream rng(4);
  auto pts = linear_points(96, rng);
  Mlp m = mlp_init_fanin({2, 8, 2}, rng);
  TrainConfig cfg;
  cfg.eta = 0.05;
  cfg.batch_size = 96;  // full batch: true gradient descent
  cfg.epochs = 40;
  const auto recs = train(m, pts.x, pts.y, cfg, rng);
  for (std::size_t e = 1; e < recs.size(); ++e)
    CHECK(recs[e].loss <= recs[e - 1].loss + 1e-12);
  CHECK(recs.back().loss < recs.front().loss);
}

TEST_CASE("training fits a separable task and records validation accuracy") {
  RandomStream rng(5);
  auto train_pts = linear_points(200, rng);
  auto val_pts = linear_points(200, rng);
  Mlp m = mlp_init_fanin({2, 16, 2}, rng);
  TrainConfig cfg;
  cfg.epochs = 30;
  TrainOptions opts;
  opts.x_val = &val_pts.x;
  opts.y_val = &val_pts.y;
  int calls = 0;
  opts.on_epoch = [&](int, const Mlp&) { ++calls; };
  const auto recs = train(m, train_pts.x, train_pts.y, cfg, rng, opts);
  CHECK(calls == 30);
  CHECK(recs.back().val_accuracy > 0.95);
  CHECK(recs.back().accuracy > 0.95);
  CHECK(recs.back().grad_norm >= 0.0);
  CHECK(evaluate(m, val_pts.x, val_pts.y) ==
        doctest::Approx(recs.back().val_accuracy));

  // predict agrees with evaluate's scoring.
  int correct = 0;
  for (std::size_t i = 0; i < val_pts.x.size(); ++i)
    if (predict(m, val_pts.x[i]) == val_pts.y[i]) ++correct;
  CHECK(static_cast<double>(correct) / static_cast<double>(val_pts.x.size()) ==
        doctest::Approx(recs.back().val_accuracy));
}

TEST_CASE("label shift mid-training dents validation accuracy") {
  RandomStream rng(6);
  auto pts = linear_points(200, rng);
  auto val = linear_points(200, rng);
  const auto y_shift = envtask::complement_labels(pts.y);
  const auto y_val_shift = envtask::complement_labels(val.y);

  Mlp m = mlp_init_fanin({2, 16, 2}, rng);
  TrainConfig cfg;
  cfg.epochs = 40;
  TrainOptions opts;
  opts.x_val = &val.x;
  opts.y_val = &val.y;
  opts.shift_epoch = 20;
  opts.y_shifted = &pts.y;  // same labels: control, no real shift
  opts.y_val_shifted = &val.y;
  const auto control = train(m, pts.x, pts.y, cfg, rng, opts);

  Mlp m2 = mlp_init_fanin({2, 16, 2}, rng);
  TrainOptions opts2 = opts;
  opts2.y_shifted = &y_shift;
  opts2.y_val_shifted = &y_val_shift;
  const auto shifted = train(m2, pts.x, pts.y, cfg, rng, opts2);

  // Right after the shift the flipped-label accuracy collapses, then
  // recovers; the control keeps sailing.
  CHECK(shifted[21].val_accuracy < 0.5);
  CHECK(shifted.back().val_accuracy > 0.8);
  CHECK(control[21].val_accuracy > 0.9);
}

TEST_CASE("non-finite network state surfaces as TrainingDiverged") {
  RandomStream rng(8);
  auto pts = linear_points(64, rng);
  Mlp m = mlp_init_fanin({2, 8, 2}, rng);
  m.w[0][0] = std::numeric_limits<double>::quiet_NaN();
  TrainConfig cfg;
  cfg.epochs = 20;
  CHECK_THROWS_AS(train(m, pts.x, pts.y, cfg, rng), TrainingDiverged);
}

TEST_CASE("prune_weights zeroes small weights and pins them") {
  RandomStream rng(9);
  Mlp m = mlp_init({2, 4, 2}, 0.5, rng);
  m.w[0][0] = 1e-9;
  m.w[0][1] = 0.4;
  const double frac = prune_weights(m, 1e-3);
  CHECK(frac > 0.0);
  CHECK(m.w[0][0] == 0.0);
  CHECK(m.w[0][1] == doctest::Approx(0.4));

  // A training step must not revive pruned weights.
  auto pts = linear_points(32, rng);
  TrainConfig cfg;
  cfg.epochs = 3;
  train(m, pts.x, pts.y, cfg, rng);
  CHECK(m.w[0][0] == 0.0);
}

TEST_CASE("train config validation") {
  TrainConfig cfg;
  cfg.eta = -0.1;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg = {};
  cfg.batch_size = 0;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg = {};
  cfg.epochs = -1;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg = {};
  cfg.mu = 1.5;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
}
