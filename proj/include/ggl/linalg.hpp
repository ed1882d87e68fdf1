#pragma once

#include <cstdint>
#include <vector>

#include "ggl/lattice.hpp"

namespace ggl {

struct CgResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// The generator of rate-1 simple random walk killed outside a domain:
/// (A u)(x) = u(x) - |Γ|⁻¹ Σ_γ u(x + γ), with u = 0 off the domain.
class KilledWalkOperator {
 public:
  KilledWalkOperator(const LatticeGraph& graph, const Region& domain);

  std::size_t size() const { return n_; }
  std::size_t degree() const { return deg_; }
  void apply(const std::vector<double>& u, std::vector<double>& out) const;
  /// Slot k of site i: region index or -1.
  std::int32_t neighbor(std::size_t i, std::size_t k) const { return nb_[i * deg_ + k]; }

 private:
  std::size_t n_;
  std::size_t deg_;
  std::vector<std::int32_t> nb_;
};

/// Jacobi-preconditioned conjugate gradient on A x = b, starting from x.
/// The diagonal of A is 1 for the killed walk, so the preconditioner is the
/// identity there; general callers pass the diagonal.
template <typename Op>
CgResult conjugate_gradient(const Op& A, const std::vector<double>& diag, const std::vector<double>& b,
                            std::vector<double>& x, double rel_tol, int max_iter);

CgResult solve_killed(const KilledWalkOperator& A, const std::vector<double>& b, std::vector<double>& x,
                      double rel_tol = 1e-12, int max_iter = 100000);

}  // namespace ggl

#include "ggl/linalg_impl.hpp"
