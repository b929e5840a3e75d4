#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gacl/colony.hpp"
#include "gacl/neural.hpp"
#include "gacl/rng.hpp"

namespace gacl::envtask {

using neural::Matrix;

// ---------------------------------------------------------------------------
// Synthetic 2-D classification tasks (features uniform on [-1,1]^2).

enum class SyntheticKind { Linear, Quadratic, Complex };

SyntheticKind synthetic_kind_from(const std::string& name);
std::string to_string(SyntheticKind k);

struct SyntheticTask {
  SyntheticKind kind = SyntheticKind::Linear;
  int n_points = 200;
  double label_noise = 0.0;  // per-point flip probability
};

struct PointSet {
  Matrix x;
  std::vector<int> y;
};

// Decision rules (all close to class-balanced on the unit square):
//   linear     y = 1  iff  x1 + x2 > 0
//   quadratic  y = 1  iff  x2 > x1^2 - 1/3
//   complex    y = 1  iff  sin(3*x1) + x1*x2 > 0
int synthetic_label(SyntheticKind k, double x1, double x2);

PointSet make_synthetic(const SyntheticTask& task, RandomStream& rng);

// 0 <-> 1; used by the distribution-shift experiments.
std::vector<int> complement_labels(const std::vector<int>& y);

// ---------------------------------------------------------------------------
// Foraging-site tasks for the colony: fixed quality vectors whose gaps set
// the difficulty tier.

enum class SiteDifficulty { Easy, Moderate, Subtle };

SiteDifficulty site_difficulty_from(const std::string& name);
std::string to_string(SiteDifficulty d);

std::vector<double> site_qualities(SiteDifficulty d);

// Swaps the best and worst site qualities (the mid-run environment change).
std::vector<double> swap_best_worst(const std::vector<double>& qualities);

// ---------------------------------------------------------------------------
// Benchmark datasets. Tabular CSVs under the data directory, reduced to
// binary problems, split 70/30 stratified by class, features z-scored with
// train-split statistics.

struct Dataset {
  std::string name;
  int n_classes = 2;
  Matrix x_train, x_test;
  std::vector<int> y_train, y_test;

  std::size_t n_features() const {
    return x_train.empty() ? 0 : x_train[0].size();
  }
};

std::vector<std::string> dataset_names();

// `data_dir` empty: $GACL_DATA if set, else the compiled-in default.
Dataset load_dataset(const std::string& name, std::uint64_t split_seed,
                     const std::string& data_dir = "");

// ---------------------------------------------------------------------------
// Colony-as-classifier: one site per class, site quality is a Gaussian
// kernel on distance to the class centroid (bandwidth = mean pairwise
// centroid distance, scores max-normalised per point), and the colony's
// final pheromone mass picks the label. Each point runs on its own derived
// stream, so results do not depend on evaluation order.

struct ClassifierConfig {
  colony::ColonyConfig colony;  // defaults overridden below in classify()
  int generations = 10;
  double obs_noise_sigma = 0.05;
};

ClassifierConfig default_classifier_config();

struct ClassifyResult {
  std::vector<int> labels;
  Matrix scores;  // per-point normalised pheromone over classes
};

// Kernel site qualities for one point given class centroids (already
// max-normalised). Exposed for tests.
std::vector<double> kernel_qualities(const std::vector<double>& x,
                                     const Matrix& centroids,
                                     double bandwidth);

Matrix class_centroids(const Matrix& x, const std::vector<int>& y,
                       int n_classes);

double mean_centroid_distance(const Matrix& centroids);

ClassifyResult gacl_classify(const Dataset& ds, const Matrix& x,
                             const ClassifierConfig& cfg, RandomStream& rng);

// Averages the two per-class score vectors and takes the argmax.
std::vector<int> colony_net_classify(const Matrix& gacl_scores,
                                     const Matrix& mlp_probs);

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth);

}  // namespace gacl::envtask
