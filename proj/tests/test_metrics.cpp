#include <doctest.h>

#include <cmath>
#include <vector>

#include "gacl/metrics.hpp"
#include "gacl/rng.hpp"

using namespace gacl;

TEST_CASE("mean and median hand values") {
  CHECK(metrics::mean_of({1.0, 2.0, 6.0}) == doctest::Approx(3.0));
  CHECK(metrics::median_of({5.0, 1.0, 3.0}) == doctest::Approx(3.0));
  CHECK(metrics::median_of({4.0, 1.0, 3.0, 2.0}) == doctest::Approx(2.5));
  CHECK(metrics::median_of({7.0}) == doctest::Approx(7.0));
}

TEST_CASE("normalize_minmax rescales to [0,1]") {
  const auto v = metrics::normalize_minmax({2.0, 4.0, 6.0});
  CHECK(v[0] == doctest::Approx(0.0));
  CHECK(v[1] == doctest::Approx(0.5));
  CHECK(v[2] == doctest::Approx(1.0));

  const auto c = metrics::normalize_minmax({3.0, 3.0, 3.0});
  for (double x : c) CHECK(x == doctest::Approx(0.5));
}

TEST_CASE("aggregate_replicates computes mean, sample sd, se") {
  // Two runs; at step 0 the values are 1 and 3: mean 2, sd sqrt(2), se 1.
  const auto agg = metrics::aggregate_replicates({{1.0, 5.0}, {3.0, 5.0}});
  REQUIRE(agg.mean.size() == 2);
  CHECK(agg.mean[0] == doctest::Approx(2.0));
  CHECK(agg.sd[0] == doctest::Approx(std::sqrt(2.0)));
  CHECK(agg.se[0] == doctest::Approx(1.0));
  CHECK(agg.mean[1] == doctest::Approx(5.0));
  CHECK(agg.sd[1] == doctest::Approx(0.0));
}

TEST_CASE("pearson hand oracle") {
  // y = 2x + 1 exactly.
  CHECK(metrics::pearson({1, 2, 3, 4}, {3, 5, 7, 9}) == doctest::Approx(1.0));
  CHECK(metrics::pearson({1, 2, 3, 4}, {9, 7, 5, 3}) == doctest::Approx(-1.0));
  // Known value: cov/sds computed by hand.
  const double r = metrics::pearson({1, 2, 3}, {2, 2, 4});
  CHECK(r == doctest::Approx(std::sqrt(3.0) / 2.0));
}

TEST_CASE("spearman is rank-based") {
  // Any strictly monotone transform gives rho = 1.
  CHECK(metrics::spearman({1, 2, 3, 4}, {10, 100, 1000, 10000}) ==
        doctest::Approx(1.0));
  CHECK(metrics::spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
  // One swapped adjacent pair out of n=4: rho = 1 - 6*2/(4*15) = 0.8.
  CHECK(metrics::spearman({1, 2, 3, 4}, {1, 3, 2, 4}) == doctest::Approx(0.8));
  // All-tied input has zero rank variance: 0 by convention.
  CHECK(metrics::spearman({1, 1, 1}, {1, 2, 3}) == doctest::Approx(0.0));
}

TEST_CASE("fit_power_law is exact on noiseless power laws") {
  RandomStream rng(31);
  for (double p : {-3.0, -1.44, -0.5, 0.25, 1.0, 3.0}) {
    const double c = 0.1 + 5.0 * rng.uniform();
    std::vector<double> x, y;
    for (double xv : {1.0, 2.0, 5.0, 10.0, 40.0, 100.0}) {
      x.push_back(xv);
      y.push_back(c * std::pow(xv, p));
    }
    const auto fit = metrics::fit_power_law(x, y);
    CHECK(fit.params.at("exponent") == doctest::Approx(p).epsilon(1e-12));
    CHECK(fit.params.at("intercept") ==
          doctest::Approx(std::log(c)).epsilon(1e-12));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.reliable);
  }
}

TEST_CASE("fit_gaussian_decay recovers exact parameters") {
  const double acc0 = 0.97, sigma0 = 0.8;
  std::vector<double> s{0.0, 0.2, 0.4, 0.8, 1.6};
  std::vector<double> acc;
  for (double v : s)
    acc.push_back(acc0 * std::exp(-v * v / (2.0 * sigma0 * sigma0)));
  const auto fit = metrics::fit_gaussian_decay(s, acc);
  CHECK(fit.params.at("acc0") == doctest::Approx(acc0).epsilon(1e-9));
  CHECK(fit.params.at("sigma0") == doctest::Approx(sigma0).epsilon(1e-9));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fit.reliable);
}

TEST_CASE("fit_gaussian_decay sigma0 within 15% under 5% noise") {
  // 20 seeds of multiplicative-noise model data; every recovered sigma0
  // must land within +-15% of the truth.
  const double acc0 = 0.95, sigma0 = 0.6;
  const std::vector<double> s{0.0, 0.1, 0.2, 0.4, 0.8, 1.6};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomStream rng(1000 + seed);
    std::vector<double> acc;
    for (double v : s) {
      const double clean = acc0 * std::exp(-v * v / (2.0 * sigma0 * sigma0));
      acc.push_back(clean * (1.0 + 0.05 * rng.gaussian()));
    }
    const auto fit = metrics::fit_gaussian_decay(s, acc);
    REQUIRE(fit.reliable);
    CHECK(fit.params.at("sigma0") ==
          doctest::Approx(sigma0).epsilon(0.15));
  }
}

TEST_CASE("fit_gaussian_decay flags increasing data as unreliable") {
  const std::vector<double> s{0.0, 0.5, 1.0, 2.0};
  const std::vector<double> acc{0.5, 0.6, 0.8, 0.95};
  const auto fit = metrics::fit_gaussian_decay(s, acc);
  CHECK_FALSE(fit.reliable);
  CHECK(std::isnan(fit.params.at("sigma0")));
}
