#pragma once

#include <map>
#include <string>
#include <vector>

namespace gacl::metrics {

// A labelled value series, the unit most plotting/aggregation helpers take.
struct Series {
  std::string label;
  std::vector<double> values;
};

// Result of a curve fit. `params` holds the named fit parameters
// (e.g. exponent/intercept for a power law, acc0/sigma0 for Gaussian decay).
// `reliable` is cleared when the data contradicts the model family
// (e.g. accuracy that increases with noise).
struct FitResult {
  std::map<std::string, double> params;
  double r_squared = 0.0;
  bool reliable = true;
};

struct Aggregate {
  std::vector<double> mean;
  std::vector<double> sd;  // sample SD, n-1 denominator
  std::vector<double> se;  // sd / sqrt(n)
};

// Min-max rescale to [0, 1]. A constant vector maps to all 0.5.
std::vector<double> normalize_minmax(const std::vector<double>& v);

// Pointwise mean/SD/SE across replicate series of equal length.
Aggregate aggregate_replicates(const std::vector<std::vector<double>>& runs);

// Least-squares fit of y = c * x^p in log-log space; params "exponent" (p)
// and "intercept" (ln c); R^2 is computed in log space.
FitResult fit_power_law(const std::vector<double>& x,
                        const std::vector<double>& y);

// Fit acc(sigma) = acc0 * exp(-sigma^2 / (2 sigma0^2)), linear in
// (sigma^2, ln acc). When the fitted slope is non-negative the decay model
// does not hold: sigma0 is NaN and the result is flagged unreliable.
FitResult fit_gaussian_decay(const std::vector<double>& sigma,
                             const std::vector<double>& acc);

// Spearman rank correlation with average ranks for ties. If either input
// has zero rank variance (all tied) the correlation is 0 by convention.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

// Plain Pearson correlation, exposed because a few tests want it directly.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

double mean_of(const std::vector<double>& v);
double median_of(std::vector<double> v);  // by value: sorts its copy

}  // namespace gacl::metrics
