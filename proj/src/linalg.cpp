#include "ggl/linalg.hpp"

#include "ggl/error.hpp"

namespace ggl {

KilledWalkOperator::KilledWalkOperator(const LatticeGraph& graph, const Region& domain)
    : n_(domain.size()), deg_(graph.degree()) {
  if (n_ > static_cast<std::size_t>(INT32_MAX)) throw Error(ErrorCode::RegionTooLarge, "domain too large");
  nb_.resize(n_ * deg_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = 0; k < deg_; ++k) {
      nb_[i * deg_ + k] = static_cast<std::int32_t>(domain.index_of(domain[i] + graph.generators()[k]));
    }
  }
}

void KilledWalkOperator::apply(const std::vector<double>& u, std::vector<double>& out) const {
  out.resize(n_);
  const double w = 1.0 / static_cast<double>(deg_);
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    const std::int32_t* row = &nb_[i * deg_];
    for (std::size_t k = 0; k < deg_; ++k) {
      if (row[k] >= 0) s += u[static_cast<std::size_t>(row[k])];
    }
    out[i] = u[i] - w * s;
  }
}

CgResult solve_killed(const KilledWalkOperator& A, const std::vector<double>& b, std::vector<double>& x,
                      double rel_tol, int max_iter) {
  CgResult r = conjugate_gradient(A, {}, b, x, rel_tol, max_iter);
  if (!r.converged) {
    throw Error(ErrorCode::SolverFailure,
                "CG stalled at relative residual " + std::to_string(r.relative_residual));
  }
  return r;
}

}  // namespace ggl
