#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace ggl {

class Rng;

double normal_cdf(double x);
/// Upper tail 1 - Φ(x), accurate for large x.
double normal_sf(double x);

/// P[X ≥ a, Y ≥ b] for a centered Gaussian pair with the given covariance.
double bivariate_normal_upper(double a, double b, double var_x, double var_y, double cov_xy);

struct BatchMeans {
  double mean = 0.0;
  double se = 0.0;
  double tau = 1.0;  // integrated autocorrelation time estimate
  std::size_t batches = 0;
  std::size_t batch_size = 0;
};

/// Batch means with batch size floor(sqrt(n)); TooFewSamples below 10 batches.
BatchMeans batch_means(std::span<const double> xs);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

/// Plain mean and standard error for independent draws.
MeanSe mean_se(std::span<const double> xs);
/// Mean and standard error of a Bernoulli sample count.
MeanSe proportion(std::size_t hits, std::size_t n);

double sample_variance(std::span<const double> xs);
double sample_covariance(std::span<const double> xs, std::span<const double> ys);

/// Two-sample Kolmogorov–Smirnov statistic sup |F_a - F_b|.
double ks_two_sample(std::vector<double> a, std::vector<double> b);
/// One-sample statistic against a continuous CDF.
double ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf);
/// Asymptotic critical value c(α) sqrt((n + m)/(n m)); n_b = 0 for one sample.
double ks_critical(double alpha, double n_a, double n_b = 0.0);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Percentile bootstrap of a statistic over resampled indices.
Interval bootstrap_ci(std::size_t n, const std::function<double(const std::vector<std::size_t>&)>& stat,
                      std::size_t resamples, double level, Rng& rng);

struct LinearFit {
  std::vector<double> coef;
  double rss = 0.0;
};

/// Least squares y ≈ X coef with X given row-major (n × p).
LinearFit least_squares(const std::vector<double>& X, const std::vector<double>& y, std::size_t p);

}  // namespace ggl
