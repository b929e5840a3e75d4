#include "gacl/envtask.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

#include "gacl/io.hpp"
#include "gacl/metrics.hpp"

#ifndef GACL_DATA_DIR
#define GACL_DATA_DIR "data"
#endif

namespace gacl::envtask {

SyntheticKind synthetic_kind_from(const std::string& name) {
  if (name == "linear") return SyntheticKind::Linear;
  if (name == "quadratic") return SyntheticKind::Quadratic;
  if (name == "complex") return SyntheticKind::Complex;
  throw std::invalid_argument("unknown synthetic task: " + name +
                              " (want linear|quadratic|complex)");
}

std::string to_string(SyntheticKind k) {
  switch (k) {
    case SyntheticKind::Linear: return "linear";
    case SyntheticKind::Quadratic: return "quadratic";
    case SyntheticKind::Complex: return "complex";
  }
  return "?";
}

int synthetic_label(SyntheticKind k, double x1, double x2) {
  switch (k) {
    case SyntheticKind::Linear: return x1 + x2 > 0.0 ? 1 : 0;
    case SyntheticKind::Quadratic: return x2 > x1 * x1 - 1.0 / 3.0 ? 1 : 0;
    case SyntheticKind::Complex:
      return std::sin(3.0 * x1) + x1 * x2 > 0.0 ? 1 : 0;
  }
  return 0;
}

PointSet make_synthetic(const SyntheticTask& task, RandomStream& rng) {
  if (task.n_points <= 0) throw std::invalid_argument("n_points must be > 0");
  if (task.label_noise < 0.0 || task.label_noise > 1.0)
    throw std::invalid_argument("label_noise must be in [0, 1]");
  PointSet ps;
  ps.x.reserve(static_cast<std::size_t>(task.n_points));
  ps.y.reserve(static_cast<std::size_t>(task.n_points));
  for (int i = 0; i < task.n_points; ++i) {
    const double x1 = rng.uniform(-1.0, 1.0);
    const double x2 = rng.uniform(-1.0, 1.0);
    int label = synthetic_label(task.kind, x1, x2);
    if (task.label_noise > 0.0 && rng.uniform() < task.label_noise)
      label = 1 - label;
    ps.x.push_back({x1, x2});
    ps.y.push_back(label);
  }
  return ps;
}

std::vector<int> complement_labels(const std::vector<int>& y) {
  std::vector<int> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] != 0 && y[i] != 1)
      throw std::invalid_argument("complement_labels expects binary labels");
    out[i] = 1 - y[i];
  }
  return out;
}

SiteDifficulty site_difficulty_from(const std::string& name) {
  if (name == "easy") return SiteDifficulty::Easy;
  if (name == "moderate") return SiteDifficulty::Moderate;
  if (name == "subtle") return SiteDifficulty::Subtle;
  throw std::invalid_argument("unknown site difficulty: " + name +
                              " (want easy|moderate|subtle)");
}

std::string to_string(SiteDifficulty d) {
  switch (d) {
    case SiteDifficulty::Easy: return "easy";
    case SiteDifficulty::Moderate: return "moderate";
    case SiteDifficulty::Subtle: return "subtle";
  }
  return "?";
}

std::vector<double> site_qualities(SiteDifficulty d) {
  switch (d) {
    case SiteDifficulty::Easy: return {1.0, 0.5, 0.4, 0.3, 0.2};
    case SiteDifficulty::Moderate: return {1.0, 0.8, 0.7, 0.6, 0.5};
    case SiteDifficulty::Subtle: return {1.0, 0.95, 0.9, 0.85, 0.8};
  }
  return {};
}

std::vector<double> swap_best_worst(const std::vector<double>& qualities) {
  if (qualities.size() < 2)
    throw std::invalid_argument("need at least 2 sites to swap");
  auto out = qualities;
  auto best = std::max_element(out.begin(), out.end()) - out.begin();
  auto worst = std::min_element(out.begin(), out.end()) - out.begin();
  std::swap(out[static_cast<std::size_t>(best)],
            out[static_cast<std::size_t>(worst)]);
  return out;
}

// ---------------------------------------------------------------------------

std::vector<std::string> dataset_names() {
  return {"iris-easy", "iris-hard", "mtcars", "swiss", "usarrests"};
}

namespace {

std::string resolve_data_dir(const std::string& data_dir) {
  if (!data_dir.empty()) return data_dir;
  if (const char* env = std::getenv("GACL_DATA"); env && *env) return env;
  return GACL_DATA_DIR;
}

struct RawData {
  Matrix x;
  std::vector<int> y;
};

RawData load_iris(const std::string& dir, const std::string& class0,
                  const std::string& class1) {
  auto t = io::read_csv(dir + "/iris.csv");
  const auto sp = t.col("species");
  const std::size_t feat[] = {t.col("sepal_length"), t.col("sepal_width"),
                              t.col("petal_length"), t.col("petal_width")};
  RawData raw;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& species = t.rows[r][sp];
    int label;
    if (species == class0) label = 0;
    else if (species == class1) label = 1;
    else continue;
    std::vector<double> row;
    for (auto c : feat) row.push_back(t.num(r, c));
    raw.x.push_back(std::move(row));
    raw.y.push_back(label);
  }
  return raw;
}

// Numeric label column used as-is (must be 0/1).
RawData load_with_binary_column(const std::string& path,
                                const std::string& label_col,
                                const std::vector<std::string>& feature_cols) {
  auto t = io::read_csv(path);
  const auto lc = t.col(label_col);
  std::vector<std::size_t> fc;
  for (const auto& name : feature_cols) fc.push_back(t.col(name));
  RawData raw;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double lv = t.num(r, lc);
    if (lv != 0.0 && lv != 1.0)
      throw io::IngestError(path + ": label column " + label_col +
                            " is not binary");
    std::vector<double> row;
    for (auto c : fc) row.push_back(t.num(r, c));
    raw.x.push_back(std::move(row));
    raw.y.push_back(static_cast<int>(lv));
  }
  return raw;
}

// Label = 1 iff the named column exceeds its median.
RawData load_with_median_split(const std::string& path,
                               const std::string& label_col,
                               const std::vector<std::string>& feature_cols) {
  auto t = io::read_csv(path);
  const auto lc = t.col(label_col);
  std::vector<std::size_t> fc;
  for (const auto& name : feature_cols) fc.push_back(t.col(name));
  std::vector<double> lv;
  for (std::size_t r = 0; r < t.rows.size(); ++r) lv.push_back(t.num(r, lc));
  const double med = metrics::median_of(lv);
  RawData raw;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    std::vector<double> row;
    for (auto c : fc) row.push_back(t.num(r, c));
    raw.x.push_back(std::move(row));
    raw.y.push_back(lv[r] > med ? 1 : 0);
  }
  return raw;
}

RawData load_raw(const std::string& name, const std::string& dir) {
  if (name == "iris-easy") return load_iris(dir, "setosa", "versicolor");
  if (name == "iris-hard") return load_iris(dir, "versicolor", "virginica");
  if (name == "mtcars")
    return load_with_binary_column(
        dir + "/mtcars.csv", "am",
        {"mpg", "cyl", "disp", "hp", "drat", "wt", "qsec", "vs", "gear",
         "carb"});
  if (name == "swiss")
    return load_with_median_split(
        dir + "/swiss.csv", "fertility",
        {"agriculture", "examination", "education", "catholic",
         "infant_mortality"});
  if (name == "usarrests")
    return load_with_median_split(dir + "/usarrests.csv", "murder",
                                  {"assault", "urban_pop", "rape"});
  std::string valid;
  for (const auto& n : dataset_names()) valid += (valid.empty() ? "" : "|") + n;
  throw std::invalid_argument("unknown dataset: " + name + " (want " + valid +
                              ")");
}

}  // namespace

Dataset load_dataset(const std::string& name, std::uint64_t split_seed,
                     const std::string& data_dir) {
  const std::string dir = resolve_data_dir(data_dir);
  RawData raw = load_raw(name, dir);
  if (raw.x.empty()) throw io::IngestError(name + ": no usable rows");

  // Stratified 70/30: shuffle each class's indices with the split stream,
  // first 70% (at least 1, at most n-1) go to train.
  std::vector<std::vector<std::size_t>> by_class(2);
  for (std::size_t i = 0; i < raw.y.size(); ++i)
    by_class[static_cast<std::size_t>(raw.y[i])].push_back(i);
  for (const auto& idx : by_class)
    if (idx.size() < 2)
      throw io::IngestError(name + ": a class has fewer than 2 rows");

  RandomStream rng(split_seed);
  Dataset ds;
  ds.name = name;
  ds.n_classes = 2;
  for (auto& idx : by_class) {
    for (std::size_t i = idx.size(); i > 1; --i) {
      const auto j = rng.uniform_int(i);
      std::swap(idx[i - 1], idx[j]);
    }
    auto n_train = static_cast<std::size_t>(
        std::llround(0.7 * static_cast<double>(idx.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, idx.size() - 1);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const auto r = idx[i];
      if (i < n_train) {
        ds.x_train.push_back(raw.x[r]);
        ds.y_train.push_back(raw.y[r]);
      } else {
        ds.x_test.push_back(raw.x[r]);
        ds.y_test.push_back(raw.y[r]);
      }
    }
  }

  // z-score with train statistics only; constant features pass through.
  const std::size_t d = ds.x_train[0].size();
  std::vector<double> mu(d, 0.0), sd(d, 0.0);
  for (const auto& row : ds.x_train)
    for (std::size_t j = 0; j < d; ++j) mu[j] += row[j];
  for (auto& m : mu) m /= static_cast<double>(ds.x_train.size());
  for (const auto& row : ds.x_train)
    for (std::size_t j = 0; j < d; ++j) {
      const double dv = row[j] - mu[j];
      sd[j] += dv * dv;
    }
  for (auto& s : sd) {
    s = std::sqrt(s / static_cast<double>(ds.x_train.size()));
    if (s == 0.0) s = 1.0;
  }
  auto apply = [&](Matrix& m) {
    for (auto& row : m)
      for (std::size_t j = 0; j < d; ++j) row[j] = (row[j] - mu[j]) / sd[j];
  };
  apply(ds.x_train);
  apply(ds.x_test);
  return ds;
}

// ---------------------------------------------------------------------------

ClassifierConfig default_classifier_config() {
  ClassifierConfig cfg;
  cfg.colony.n_ants = 50;
  cfg.colony.waves_per_gen = 2;
  cfg.generations = 10;
  cfg.obs_noise_sigma = 0.05;
  return cfg;
}

Matrix class_centroids(const Matrix& x, const std::vector<int>& y,
                       int n_classes) {
  if (x.size() != y.size() || x.empty())
    throw std::invalid_argument("centroids: bad training data shapes");
  const std::size_t d = x[0].size();
  Matrix cent(static_cast<std::size_t>(n_classes),
              std::vector<double>(d, 0.0));
  std::vector<std::size_t> counts(static_cast<std::size_t>(n_classes), 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] < 0 || y[i] >= n_classes)
      throw std::invalid_argument("centroids: label out of range");
    auto c = static_cast<std::size_t>(y[i]);
    for (std::size_t j = 0; j < d; ++j) cent[c][j] += x[i][j];
    ++counts[c];
  }
  for (std::size_t c = 0; c < cent.size(); ++c) {
    if (counts[c] == 0)
      throw std::runtime_error("centroids: class " + std::to_string(c) +
                               " has no training points");
    for (auto& v : cent[c]) v /= static_cast<double>(counts[c]);
  }
  return cent;
}

double mean_centroid_distance(const Matrix& centroids) {
  if (centroids.size() < 2)
    throw std::invalid_argument("need >= 2 centroids for a bandwidth");
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < centroids.size(); ++a)
    for (std::size_t b = a + 1; b < centroids.size(); ++b) {
      double s = 0.0;
      for (std::size_t j = 0; j < centroids[a].size(); ++j) {
        const double dv = centroids[a][j] - centroids[b][j];
        s += dv * dv;
      }
      total += std::sqrt(s);
      ++pairs;
    }
  return total / static_cast<double>(pairs);
}

std::vector<double> kernel_qualities(const std::vector<double>& x,
                                     const Matrix& centroids,
                                     double bandwidth) {
  if (bandwidth <= 0.0)
    throw std::invalid_argument("kernel bandwidth must be > 0");
  std::vector<double> q(centroids.size());
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    if (centroids[c].size() != x.size())
      throw std::invalid_argument("kernel: dimension mismatch");
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double dv = x[j] - centroids[c][j];
      s += dv * dv;
    }
    q[c] = std::exp(-s / (2.0 * bandwidth * bandwidth));
  }
  // Per-point max-normalisation keeps the best site's quality at 1 for every
  // point; the argmax is unchanged and far points still give the colony a
  // usable signal.
  const double mx = *std::max_element(q.begin(), q.end());
  if (mx > 0.0)
    for (auto& v : q) v /= mx;
  else
    std::fill(q.begin(), q.end(), 1.0);  // all-zero kernels: no preference
  return q;
}

ClassifyResult gacl_classify(const Dataset& ds, const Matrix& x,
                             const ClassifierConfig& cfg, RandomStream& rng) {
  colony::validate(cfg.colony);
  if (cfg.generations <= 0)
    throw std::invalid_argument("classifier generations must be > 0");
  if (cfg.obs_noise_sigma < 0.0)
    throw std::invalid_argument("obs_noise_sigma must be >= 0");
  const Matrix cent = class_centroids(ds.x_train, ds.y_train, ds.n_classes);
  const double bw = mean_centroid_distance(cent);
  if (bw <= 0.0) throw std::runtime_error("identical class centroids");

  ClassifyResult res;
  res.labels.reserve(x.size());
  res.scores.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto env = colony::make_environment(kernel_qualities(x[i], cent, bw),
                                        cfg.obs_noise_sigma);
    auto stream = rng.derive(i, 0x636c6673ULL);
    auto traj = colony::run_gacl(env, cfg.colony, cfg.generations, stream);
    const auto& tau = traj.back().tau_next;
    const double total = std::accumulate(tau.begin(), tau.end(), 0.0);
    std::vector<double> score(tau.size());
    for (std::size_t c = 0; c < tau.size(); ++c) score[c] = tau[c] / total;
    res.labels.push_back(static_cast<int>(
        std::max_element(score.begin(), score.end()) - score.begin()));
    res.scores.push_back(std::move(score));
  }
  return res;
}

std::vector<int> colony_net_classify(const Matrix& gacl_scores,
                                     const Matrix& mlp_probs) {
  if (gacl_scores.size() != mlp_probs.size())
    throw std::invalid_argument("colony-net: row count mismatch");
  std::vector<int> out;
  out.reserve(gacl_scores.size());
  for (std::size_t i = 0; i < gacl_scores.size(); ++i) {
    if (gacl_scores[i].size() != mlp_probs[i].size() || gacl_scores[i].empty())
      throw std::invalid_argument("colony-net: class count mismatch");
    std::vector<double> avg(gacl_scores[i].size());
    for (std::size_t c = 0; c < avg.size(); ++c)
      avg[c] = 0.5 * (gacl_scores[i][c] + mlp_probs[i][c]);
    out.push_back(static_cast<int>(
        std::max_element(avg.begin(), avg.end()) - avg.begin()));
  }
  return out;
}

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.size() != truth.size() || pred.empty())
    throw std::invalid_argument("accuracy: size mismatch or empty");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (pred[i] == truth[i]) ++hit;
  return static_cast<double>(hit) / static_cast<double>(pred.size());
}

}  // namespace gacl::envtask
