#include "gacl/neural.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace gacl::neural {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void check_dims(const std::vector<int>& dims) {
  require(dims.size() >= 2, "mlp: need at least input and output layer");
  for (int d : dims) require(d >= 1, "mlp: zero-width layer");
}

Mlp make_shape(const std::vector<int>& dims) {
  check_dims(dims);
  Mlp mlp;
  mlp.dims = dims;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    mlp.w.emplace_back(static_cast<std::size_t>(dims[l + 1]) *
                           static_cast<std::size_t>(dims[l]),
                       0.0);
    mlp.b.emplace_back(static_cast<std::size_t>(dims[l + 1]), 0.0);
  }
  return mlp;
}

}  // namespace

void validate(const TrainConfig& cfg) {
  require(std::isfinite(cfg.eta) && cfg.eta >= 0.0, "train: eta must be >= 0");
  require(cfg.mu >= 0.0 && cfg.mu < 1.0, "train: mu must be in [0, 1)");
  require(cfg.batch_size >= 1, "train: batch_size must be >= 1");
  require(cfg.epochs >= 0, "train: epochs must be >= 0");
  require(cfg.decay_delta >= 0.0 && cfg.decay_delta < 1.0,
          "train: decay_delta must be in [0, 1)");
}

Mlp mlp_init(const std::vector<int>& dims, double scale, RandomStream& rng) {
  require(std::isfinite(scale) && scale >= 0.0, "mlp_init: scale must be >= 0");
  Mlp mlp = make_shape(dims);
  for (auto& layer : mlp.w) {
    for (double& w : layer) w = rng.uniform(-scale, scale);
  }
  return mlp;
}

Mlp mlp_init_fanin(const std::vector<int>& dims, RandomStream& rng,
                   double base) {
  Mlp mlp = make_shape(dims);
  for (std::size_t l = 0; l < mlp.n_layers(); ++l) {
    const double s = base / std::sqrt(static_cast<double>(dims[l]));
    for (double& w : mlp.w[l]) w = rng.uniform(-s, s);
  }
  return mlp;
}

ForwardPass forward(const Mlp& mlp, const std::vector<double>& x) {
  require(mlp.n_layers() >= 1, "forward: uninitialized net");
  require(x.size() == static_cast<std::size_t>(mlp.dims[0]),
          "forward: input width mismatch");
  for (double v : x) {
    if (!std::isfinite(v)) {
      throw std::domain_error("forward: non-finite input");
    }
  }
  ForwardPass pass;
  pass.acts.push_back(x);
  std::vector<double> cur = x;
  const std::size_t nl = mlp.n_layers();
  for (std::size_t l = 0; l < nl; ++l) {
    const int nout = mlp.dims[l + 1];
    const int nin = mlp.dims[l];
    std::vector<double> z(static_cast<std::size_t>(nout));
    for (int i = 0; i < nout; ++i) {
      double s = mlp.b[l][static_cast<std::size_t>(i)];
      const double* row =
          mlp.w[l].data() + static_cast<std::size_t>(i) * nin;
      for (int j = 0; j < nin; ++j) s += row[j] * cur[static_cast<std::size_t>(j)];
      z[static_cast<std::size_t>(i)] = s;
    }
    if (l + 1 < nl) {
      for (double& v : z) v = std::tanh(v);
      pass.acts.push_back(z);
      cur = std::move(z);
    } else {
      // Stable softmax on the output layer.
      const double m = *std::max_element(z.begin(), z.end());
      double sum = 0.0;
      for (double& v : z) {
        v = std::exp(v - m);
        sum += v;
      }
      for (double& v : z) v /= sum;
      pass.probs = std::move(z);
    }
  }
  return pass;
}

double loss(const std::vector<double>& probs, int label) {
  require(label >= 0 && static_cast<std::size_t>(label) < probs.size(),
          "loss: label outside [0, C)");
  return -std::log(std::max(probs[static_cast<std::size_t>(label)], 1e-12));
}

Gradients zeros_like(const Mlp& mlp) {
  Gradients g;
  for (const auto& layer : mlp.w) g.dw.emplace_back(layer.size(), 0.0);
  for (const auto& layer : mlp.b) g.db.emplace_back(layer.size(), 0.0);
  return g;
}

Gradients backward(const Mlp& mlp, const ForwardPass& pass, int label) {
  const std::size_t nl = mlp.n_layers();
  require(pass.acts.size() == nl, "backward: cache/net mismatch");
  require(pass.probs.size() == static_cast<std::size_t>(mlp.dims.back()),
          "backward: cache/net mismatch");
  require(label >= 0 && label < mlp.dims.back(),
          "backward: label outside [0, C)");

  Gradients g = zeros_like(mlp);
  // Softmax + cross-entropy: output delta is probs - onehot.
  std::vector<double> delta = pass.probs;
  delta[static_cast<std::size_t>(label)] -= 1.0;

  for (std::size_t l = nl; l-- > 0;) {
    const int nout = mlp.dims[l + 1];
    const int nin = mlp.dims[l];
    const auto& a = pass.acts[l];
    for (int i = 0; i < nout; ++i) {
      const double d = delta[static_cast<std::size_t>(i)];
      double* grow = g.dw[l].data() + static_cast<std::size_t>(i) * nin;
      for (int j = 0; j < nin; ++j) grow[j] = d * a[static_cast<std::size_t>(j)];
      g.db[l][static_cast<std::size_t>(i)] = d;
    }
    if (l > 0) {
      std::vector<double> prev(static_cast<std::size_t>(nin), 0.0);
      for (int i = 0; i < nout; ++i) {
        const double d = delta[static_cast<std::size_t>(i)];
        const double* row = mlp.w[l].data() + static_cast<std::size_t>(i) * nin;
        for (int j = 0; j < nin; ++j) prev[static_cast<std::size_t>(j)] += row[j] * d;
      }
      // tanh' = 1 - a^2 on the cached activations.
      for (int j = 0; j < nin; ++j) {
        const double a_j = a[static_cast<std::size_t>(j)];
        prev[static_cast<std::size_t>(j)] *= 1.0 - a_j * a_j;
      }
      delta = std::move(prev);
    }
  }
  return g;
}

void accumulate(Gradients& into, const Gradients& g) {
  for (std::size_t l = 0; l < into.dw.size(); ++l) {
    for (std::size_t i = 0; i < into.dw[l].size(); ++i) {
      into.dw[l][i] += g.dw[l][i];
    }
    for (std::size_t i = 0; i < into.db[l].size(); ++i) {
      into.db[l][i] += g.db[l][i];
    }
  }
}

void scale(Gradients& g, double s) {
  for (auto& layer : g.dw) {
    for (double& v : layer) v *= s;
  }
  for (auto& layer : g.db) {
    for (double& v : layer) v *= s;
  }
}

double grad_norm(const Gradients& g) {
  double s = 0.0;
  for (const auto& layer : g.dw) {
    for (double v : layer) s += v * v;
  }
  for (const auto& layer : g.db) {
    for (double v : layer) s += v * v;
  }
  return std::sqrt(s);
}

void sgd_step(Mlp& mlp, const Gradients& g, Gradients& velocity,
              const TrainConfig& cfg) {
  validate(cfg);
  require(g.dw.size() == mlp.n_layers() && g.db.size() == mlp.n_layers(),
          "sgd_step: gradient/net mismatch");
  if (velocity.dw.empty()) velocity = zeros_like(mlp);
  for (std::size_t l = 0; l < mlp.n_layers(); ++l) {
    require(g.dw[l].size() == mlp.w[l].size() &&
                g.db[l].size() == mlp.b[l].size(),
            "sgd_step: gradient/net mismatch");
    const bool masked = !mlp.mask.empty();
    for (std::size_t i = 0; i < mlp.w[l].size(); ++i) {
      const double gv = g.dw[l][i];
      if (!std::isfinite(gv)) {
        throw TrainingDiverged("sgd_step: non-finite weight gradient");
      }
      if (masked && !mlp.mask[l][i]) {
        mlp.w[l][i] = 0.0;
        velocity.dw[l][i] = 0.0;
        continue;
      }
      double& v = velocity.dw[l][i];
      v = cfg.mu * v - cfg.eta * gv;
      mlp.w[l][i] = (1.0 - cfg.decay_delta) * mlp.w[l][i] + v;
    }
    for (std::size_t i = 0; i < mlp.b[l].size(); ++i) {
      const double gv = g.db[l][i];
      if (!std::isfinite(gv)) {
        throw TrainingDiverged("sgd_step: non-finite bias gradient");
      }
      double& v = velocity.db[l][i];
      v = cfg.mu * v - cfg.eta * gv;
      mlp.b[l][i] += v;
    }
  }
}

int predict(const Mlp& mlp, const std::vector<double>& x) {
  const auto pass = forward(mlp, x);
  return static_cast<int>(std::max_element(pass.probs.begin(),
                                           pass.probs.end()) -
                          pass.probs.begin());
}

double evaluate(const Mlp& mlp, const Matrix& x, const std::vector<int>& y) {
  require(x.size() == y.size() && !x.empty(), "evaluate: size mismatch");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (predict(mlp, x[i]) == y[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(x.size());
}

std::vector<EpochRecord> train(Mlp& mlp, const Matrix& x,
                               const std::vector<int>& y,
                               const TrainConfig& cfg, RandomStream& rng,
                               const TrainOptions& opts) {
  validate(cfg);
  require(!x.empty() && x.size() == y.size(), "train: data size mismatch");
  const int n_classes = mlp.dims.back();
  for (const auto& row : x) {
    require(row.size() == static_cast<std::size_t>(mlp.dims[0]),
            "train: feature width mismatch");
  }
  for (int label : y) {
    require(label >= 0 && label < n_classes, "train: label outside [0, C)");
  }
  if (opts.shift_epoch > 0) {
    require(opts.y_shifted && opts.y_shifted->size() == y.size(),
            "train: shift requested without shifted labels");
  }

  const std::size_t n = x.size();
  Gradients velocity = zeros_like(mlp);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<EpochRecord> records;
  records.reserve(static_cast<std::size_t>(cfg.epochs));

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const bool shifted = opts.shift_epoch > 0 && epoch > opts.shift_epoch;
    const std::vector<int>& labels = shifted ? *opts.y_shifted : y;
    // Seeded Fisher-Yates shuffle.
    for (std::size_t i = n; i > 1; --i) {
      const std::size_t j =
          static_cast<std::size_t>(rng.uniform_int(static_cast<std::uint64_t>(i)));
      std::swap(order[i - 1], order[j]);
    }
    double loss_sum = 0.0;
    std::size_t correct = 0;
    double gn_sum = 0.0;
    int n_batches = 0;
    std::size_t pos = 0;
    while (pos < n) {
      const std::size_t m =
          std::min(static_cast<std::size_t>(cfg.batch_size), n - pos);
      Gradients batch_grad = zeros_like(mlp);
      for (std::size_t bi = 0; bi < m; ++bi) {
        const std::size_t idx = order[pos + bi];
        const auto pass = forward(mlp, x[idx]);
        loss_sum += loss(pass.probs, labels[idx]);
        const int pred = static_cast<int>(
            std::max_element(pass.probs.begin(), pass.probs.end()) -
            pass.probs.begin());
        if (pred == labels[idx]) ++correct;
        accumulate(batch_grad, backward(mlp, pass, labels[idx]));
      }
      scale(batch_grad, 1.0 / static_cast<double>(m));
      gn_sum += grad_norm(batch_grad);
      ++n_batches;
      sgd_step(mlp, batch_grad, velocity, cfg);
      pos += m;
    }
    EpochRecord rec;
    rec.loss = loss_sum / static_cast<double>(n);
    rec.accuracy = static_cast<double>(correct) / static_cast<double>(n);
    rec.grad_norm = gn_sum / static_cast<double>(n_batches);
    if (opts.x_val && opts.y_val) {
      const std::vector<int>& vy =
          (shifted && opts.y_val_shifted) ? *opts.y_val_shifted : *opts.y_val;
      rec.val_accuracy = evaluate(mlp, *opts.x_val, vy);
    } else {
      rec.val_accuracy = std::numeric_limits<double>::quiet_NaN();
    }
    records.push_back(rec);
    if (opts.on_epoch) opts.on_epoch(epoch, mlp);
  }
  return records;
}

double prune_weights(Mlp& mlp, double threshold) {
  require(std::isfinite(threshold), "prune_weights: non-finite threshold");
  if (mlp.mask.empty()) {
    for (const auto& layer : mlp.w) {
      mlp.mask.emplace_back(layer.size(), std::uint8_t{1});
    }
  }
  std::size_t total = 0, pruned = 0;
  for (std::size_t l = 0; l < mlp.w.size(); ++l) {
    for (std::size_t i = 0; i < mlp.w[l].size(); ++i) {
      ++total;
      if (std::abs(mlp.w[l][i]) < threshold) {
        mlp.w[l][i] = 0.0;
        mlp.mask[l][i] = 0;
      }
      if (!mlp.mask[l][i]) ++pruned;
    }
  }
  return static_cast<double>(pruned) / static_cast<double>(total);
}

}  // namespace gacl::neural
