#include "ggl/stats.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "ggl/error.hpp"
#include "ggl/quadrature.hpp"
#include "ggl/rng.hpp"

namespace ggl {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double bivariate_normal_upper(double a, double b, double var_x, double var_y, double cov_xy) {
  if (!(var_x > 0.0) || !(var_y > 0.0)) throw Error(ErrorCode::InvalidArgument, "variances must be positive");
  const double sx = std::sqrt(var_x), sy = std::sqrt(var_y);
  const double rho = cov_xy / (sx * sy);
  const double za = a / sx, zb = b / sy;
  if (std::abs(rho) >= 1.0 - 1e-14) {
    return rho > 0 ? normal_sf(std::max(za, zb)) : std::max(0.0, normal_sf(za) - normal_cdf(-zb));
  }
  const double s = std::sqrt(1.0 - rho * rho);
  // ∫_{za}^∞ φ(u) Φ̄((zb - ρu)/s) du
  auto f = [&](double u) {
    return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi) * normal_sf((zb - rho * u) / s);
  };
  const double hi = std::max(za, 0.0) + 40.0;
  return adaptive_simpson(f, za, hi, 1e-13);
}

BatchMeans batch_means(std::span<const double> xs) {
  const std::size_t n = xs.size();
  const std::size_t b = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
  const std::size_t k = b == 0 ? 0 : n / b;
  if (k < 10) {
    throw Error(ErrorCode::TooFewSamples, std::to_string(n) + " samples give " + std::to_string(k) + " batches");
  }
  BatchMeans res;
  res.batch_size = b;
  res.batches = k;
  std::vector<double> means(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < b; ++i) s += xs[j * b + i];
    means[j] = s / static_cast<double>(b);
  }
  double m = 0.0;
  for (double v : means) m += v;
  m /= static_cast<double>(k);
  double var_b = 0.0;
  for (double v : means) var_b += (v - m) * (v - m);
  var_b /= static_cast<double>(k - 1);
  res.mean = m;
  res.se = std::sqrt(var_b / static_cast<double>(k));
  const double var_x = sample_variance(xs.subspan(0, k * b));
  res.tau = var_x > 0.0 ? static_cast<double>(b) * var_b / var_x : 1.0;
  return res;
}

MeanSe mean_se(std::span<const double> xs) {
  if (xs.empty()) throw Error(ErrorCode::TooFewSamples, "empty sample");
  MeanSe r;
  for (double v : xs) r.mean += v;
  r.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) r.se = std::sqrt(sample_variance(xs) / static_cast<double>(xs.size()));
  return r;
}

MeanSe proportion(std::size_t hits, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::TooFewSamples, "empty sample");
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
}

double sample_variance(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n < 2) return 0.0;
  double m = 0.0;
  for (double v : xs) m += v;
  m /= static_cast<double>(n);
  double s = 0.0;
  for (double v : xs) s += (v - m) * (v - m);
  return s / static_cast<double>(n - 1);
}

double sample_covariance(std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = xs.size();
  if (n != ys.size()) throw Error(ErrorCode::InvalidArgument, "covariance of unequal samples");
  if (n < 2) return 0.0;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += (xs[i] - mx) * (ys[i] - my);
  return s / static_cast<double>(n - 1);
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::TooFewSamples, "KS on an empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf) {
  if (xs.empty()) throw Error(ErrorCode::TooFewSamples, "KS on an empty sample");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_critical(double alpha, double n_a, double n_b) {
  // c(α) = sqrt(-ln(α/2)/2); 1.628 at α = 0.01.
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  const double eff = n_b > 0.0 ? n_a * n_b / (n_a + n_b) : n_a;
  return c / std::sqrt(eff);
}

Interval bootstrap_ci(std::size_t n, const std::function<double(const std::vector<std::size_t>&)>& stat,
                      std::size_t resamples, double level, Rng& rng) {
  if (n == 0) throw Error(ErrorCode::TooFewSamples, "bootstrap of an empty sample");
  std::vector<double> stats(resamples);
  std::vector<std::size_t> idx(n);
  for (std::size_t r = 0; r < resamples; ++r) {
    for (auto& i : idx) i = static_cast<std::size_t>(rng.below(n));
    stats[r] = stat(idx);
  }
  std::sort(stats.begin(), stats.end());
  const double a = (1.0 - level) / 2.0;
  auto q = [&](double p) {
    const double pos = p * static_cast<double>(resamples - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, resamples - 1);
    return stats[lo] + (pos - static_cast<double>(lo)) * (stats[hi] - stats[lo]);
  };
  return {q(a), q(1.0 - a)};
}

LinearFit least_squares(const std::vector<double>& X, const std::vector<double>& y, std::size_t p) {
  const std::size_t n = y.size();
  if (X.size() != n * p || n < p) throw Error(ErrorCode::InvalidArgument, "least squares shape mismatch");
  Eigen::MatrixXd A(n, p);
  Eigen::VectorXd b(n);
  for (std::size_t i = 0; i < n; ++i) {
    b(i) = y[i];
    for (std::size_t j = 0; j < p; ++j) A(i, j) = X[i * p + j];
  }
  const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
  LinearFit fit;
  fit.coef.assign(c.data(), c.data() + p);
  fit.rss = (A * c - b).squaredNorm();
  return fit;
}

}  // namespace ggl
