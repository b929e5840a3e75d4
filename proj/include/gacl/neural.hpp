#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "gacl/rng.hpp"

namespace gacl::neural {

using Matrix = std::vector<std::vector<double>>;

// Fully connected net, float64 throughout: tanh hidden layers, softmax
// output trained with cross-entropy. Weights are row-major [out][in],
// flattened per layer. `mask` (same shape as w, empty when dense) pins
// pruned weights at zero through later updates.
struct Mlp {
  std::vector<int> dims;
  std::vector<std::vector<double>> w;
  std::vector<std::vector<double>> b;
  std::vector<std::vector<std::uint8_t>> mask;

  std::size_t n_layers() const { return dims.empty() ? 0 : dims.size() - 1; }
};

struct TrainConfig {
  double eta = 0.1;       // learning rate
  double mu = 0.0;        // momentum
  int batch_size = 16;
  int epochs = 50;
  double decay_delta = 0.0;  // per-step multiplicative weight decay
};

void validate(const TrainConfig& cfg);

struct Gradients {
  std::vector<std::vector<double>> dw;
  std::vector<std::vector<double>> db;
};

struct ForwardPass {
  // acts[0] is the input, acts[l] the post-tanh activations of hidden
  // layer l; the output layer's softmax lives in `probs`.
  std::vector<std::vector<double>> acts;
  std::vector<double> probs;
};

struct EpochRecord {
  double loss = 0.0;       // mean cross-entropy over the epoch's samples
  double accuracy = 0.0;   // fraction correct as samples were served
  double grad_norm = 0.0;  // mean 2-norm of the per-batch gradient
  double val_accuracy = 0.0;  // NaN when no validation set was given
};

// Raised when training hits non-finite values (diverged run).
struct TrainingDiverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Weights ~ Uniform(-scale, +scale), biases 0.
Mlp mlp_init(const std::vector<int>& dims, double scale, RandomStream& rng);
// Per-layer width base/sqrt(fan-in); what the experiments use (base 0.5).
Mlp mlp_init_fanin(const std::vector<int>& dims, RandomStream& rng,
                   double base = 0.5);

ForwardPass forward(const Mlp& mlp, const std::vector<double>& x);

// Cross-entropy -log p[label], floored at 1e-12 before the log.
double loss(const std::vector<double>& probs, int label);

// Backprop for one sample from a cached forward pass.
Gradients backward(const Mlp& mlp, const ForwardPass& pass, int label);

Gradients zeros_like(const Mlp& mlp);
void accumulate(Gradients& into, const Gradients& g);
void scale(Gradients& g, double s);
double grad_norm(const Gradients& g);

// v <- mu*v - eta*g;  w <- (1-delta)*w + v;  b <- b + v (no decay on
// biases). Masked weights stay pinned at zero. Throws TrainingDiverged on
// non-finite gradients.
void sgd_step(Mlp& mlp, const Gradients& g, Gradients& velocity,
              const TrainConfig& cfg);

struct TrainOptions {
  const Matrix* x_val = nullptr;
  const std::vector<int>* y_val = nullptr;
  // When shift_epoch > 0, epochs after it serve y_shifted (and score
  // validation against y_val_shifted when present).
  int shift_epoch = 0;
  const std::vector<int>* y_shifted = nullptr;
  const std::vector<int>* y_val_shifted = nullptr;
  // Observer called after every epoch (weight-trace recording).
  std::function<void(int epoch, const Mlp&)> on_epoch;
};

// Mini-batch SGD with a seeded shuffle per epoch; returns one record per
// epoch. Loss/accuracy are measured on samples as they are served, summed
// in shuffle order.
std::vector<EpochRecord> train(Mlp& mlp, const Matrix& x,
                               const std::vector<int>& y,
                               const TrainConfig& cfg, RandomStream& rng,
                               const TrainOptions& opts = {});

double evaluate(const Mlp& mlp, const Matrix& x, const std::vector<int>& y);

int predict(const Mlp& mlp, const std::vector<double>& x);

// Zeroes and masks weights with |w| < threshold (strict, so threshold 0
// prunes nothing); returns the pruned fraction of weight entries.
double prune_weights(Mlp& mlp, double threshold);

}  // namespace gacl::neural
