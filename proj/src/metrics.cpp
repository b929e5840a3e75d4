#include "gacl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace gacl::metrics {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void require_finite(const std::vector<double>& v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument(std::string(what) + ": non-finite value");
    }
  }
}

// Simple ordinary least squares on (x, y); returns {slope, intercept, r2}.
struct Ols {
  double slope, intercept, r2;
};

Ols ols(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  require(sxx > 0.0, "ols: x values are all identical");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (intercept + slope * x[i]);
    ss_res += r * r;
  }
  // Constant y fitted by a flat line is a perfect fit, not an undefined one.
  const double r2 = (syy > 0.0) ? 1.0 - ss_res / syy : 1.0;
  return {slope, intercept, r2};
}

std::vector<double> average_ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double mean_of(const std::vector<double>& v) {
  require(!v.empty(), "mean_of: empty vector");
  return std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
  require(!v.empty(), "median_of: empty vector");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<double> normalize_minmax(const std::vector<double>& v) {
  require(!v.empty(), "normalize_minmax: empty vector");
  require_finite(v, "normalize_minmax");
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double lo = *lo_it, hi = *hi_it;
  std::vector<double> out(v.size());
  if (hi == lo) {
    std::fill(out.begin(), out.end(), 0.5);
    return out;
  }
  const double inv = 1.0 / (hi - lo);
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - lo) * inv;
  return out;
}

Aggregate aggregate_replicates(const std::vector<std::vector<double>>& runs) {
  require(runs.size() >= 2, "aggregate_replicates: need at least 2 runs");
  const std::size_t len = runs.front().size();
  require(len > 0, "aggregate_replicates: empty series");
  for (const auto& r : runs) {
    require(r.size() == len, "aggregate_replicates: length mismatch");
    require_finite(r, "aggregate_replicates");
  }
  const double n = static_cast<double>(runs.size());
  Aggregate agg;
  agg.mean.assign(len, 0.0);
  agg.sd.assign(len, 0.0);
  agg.se.assign(len, 0.0);
  for (std::size_t t = 0; t < len; ++t) {
    double m = 0.0;
    for (const auto& r : runs) m += r[t];
    m /= n;
    double ss = 0.0;
    for (const auto& r : runs) ss += (r[t] - m) * (r[t] - m);
    agg.mean[t] = m;
    agg.sd[t] = std::sqrt(ss / (n - 1.0));
    agg.se[t] = agg.sd[t] / std::sqrt(n);
  }
  return agg;
}

FitResult fit_power_law(const std::vector<double>& x,
                        const std::vector<double>& y) {
  require(x.size() == y.size(), "fit_power_law: length mismatch");
  require(x.size() >= 3, "fit_power_law: need at least 3 points");
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i] > 0.0 && y[i] > 0.0, "fit_power_law: values must be > 0");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  const Ols f = ols(lx, ly);
  FitResult res;
  res.params["exponent"] = f.slope;
  res.params["intercept"] = f.intercept;
  res.r_squared = f.r2;
  return res;
}

FitResult fit_gaussian_decay(const std::vector<double>& sigma,
                             const std::vector<double>& acc) {
  require(sigma.size() == acc.size(), "fit_gaussian_decay: length mismatch");
  require(sigma.size() >= 3, "fit_gaussian_decay: need at least 3 points");
  bool has_zero = false;
  std::vector<double> s2(sigma.size()), la(acc.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    require(sigma[i] >= 0.0, "fit_gaussian_decay: sigma must be >= 0");
    require(acc[i] > 0.0, "fit_gaussian_decay: accuracy must be > 0");
    has_zero = has_zero || sigma[i] == 0.0;
    s2[i] = sigma[i] * sigma[i];
    la[i] = std::log(acc[i]);
  }
  require(has_zero, "fit_gaussian_decay: sigma grid must include 0");
  const Ols f = ols(s2, la);
  FitResult res;
  res.params["acc0"] = std::exp(f.intercept);
  res.params["slope"] = f.slope;
  res.r_squared = f.r2;
  if (f.slope < 0.0) {
    res.params["sigma0"] = std::sqrt(-1.0 / (2.0 * f.slope));
  } else {
    res.params["sigma0"] = std::numeric_limits<double>::quiet_NaN();
    res.reliable = false;
  }
  return res;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size(), "pearson: length mismatch");
  require(x.size() >= 2, "pearson: need at least 2 points");
  const double mx = mean_of(x), my = mean_of(y);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size(), "spearman: length mismatch");
  require(x.size() >= 2, "spearman: need at least 2 points");
  require_finite(x, "spearman");
  require_finite(y, "spearman");
  return pearson(average_ranks(x), average_ranks(y));
}

}  // namespace gacl::metrics
