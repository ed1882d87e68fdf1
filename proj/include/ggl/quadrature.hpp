#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace ggl {

struct QuadratureResult {
  std::vector<double> value;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

/// Integrand writing `width` components at point s into out.
using VectorIntegrand = std::function<void(double s, double* out)>;

/// Adaptive Simpson over [a, b] applied to all components at once; the
/// subdivision criterion is the max-norm of the Richardson error estimate.
QuadratureResult adaptive_simpson(const VectorIntegrand& f, std::size_t width, double a, double b,
                                  double abs_tol, std::size_t max_evaluations = 2'000'000,
                                  int max_depth = 60);

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double abs_tol,
                        bool* converged = nullptr);

/// Composite trapezoid on n uniform panels.
double trapezoid(const std::function<double(double)>& f, double a, double b, std::size_t panels);

}  // namespace ggl
