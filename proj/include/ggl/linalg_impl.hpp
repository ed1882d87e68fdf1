#pragma once

#include <cmath>

namespace ggl {

namespace detail {
inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}
}  // namespace detail

template <typename Op>
CgResult conjugate_gradient(const Op& A, const std::vector<double>& diag, const std::vector<double>& b,
                            std::vector<double>& x, double rel_tol, int max_iter) {
  const std::size_t n = b.size();
  CgResult res;
  if (x.size() != n) x.assign(n, 0.0);
  const double bnorm = std::sqrt(detail::dot(b, b));
  if (bnorm == 0.0) {
    x.assign(n, 0.0);
    res.converged = true;
    return res;
  }
  std::vector<double> r(n), z(n), p(n), q(n);
  A.apply(x, q);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
  auto precondition = [&](const std::vector<double>& in, std::vector<double>& out) {
    if (diag.empty()) {
      out = in;
    } else {
      for (std::size_t i = 0; i < n; ++i) out[i] = in[i] / diag[i];
    }
  };
  precondition(r, z);
  p = z;
  double rz = detail::dot(r, z);
  double rnorm = std::sqrt(detail::dot(r, r));
  while (rnorm > rel_tol * bnorm && res.iterations < max_iter) {
    A.apply(p, q);
    const double alpha = rz / detail::dot(p, q);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    precondition(r, z);
    const double rz_new = detail::dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    rnorm = std::sqrt(detail::dot(r, r));
    ++res.iterations;
  }
  res.relative_residual = rnorm / bnorm;
  res.converged = rnorm <= rel_tol * bnorm;
  return res;
}

}  // namespace ggl
