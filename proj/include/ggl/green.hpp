#pragma once

#include <variant>
#include <vector>

#include "ggl/lattice.hpp"
#include "ggl/linalg.hpp"

namespace ggl {

/// Nonnegative weights on a finite support.
struct DiscreteMeasure {
  Region support;
  std::vector<double> weights;

  double mass() const;
  double at(const Vertex& x) const;
};

/// Green function of rate-1 SRW killed on leaving a finite domain.
class GreenOperator {
 public:
  GreenOperator(const LatticeGraph& graph, Region domain, double rel_tol = 1e-12);

  const Region& domain() const { return domain_; }
  const LatticeGraph& graph() const { return graph_; }
  const KilledWalkOperator& generator() const { return op_; }

  /// u = A⁻¹ rhs on the domain.
  std::vector<double> solve(const std::vector<double>& rhs) const;
  /// z ↦ g(z, y) = g(y, z).
  std::vector<double> column(const Vertex& y) const;
  double operator()(const Vertex& x, const Vertex& y) const;

 private:
  LatticeGraph graph_;
  Region domain_;
  KilledWalkOperator op_;
  double rel_tol_;
};

/// Infinite-volume request: extrapolate from nested cubes to within tol.
struct Infinite {
  double tol = 1e-3;
  int start_radius = 8;
  double ratio = 1.5;
  std::size_t max_sites = 5'000'000;
};

using Domain = std::variant<Region, Infinite>;

struct GreenValue {
  double value = 0.0;
  double error_bound = 0.0;
};

GreenValue green(const LatticeGraph& graph, const Domain& domain, const Vertex& x, const Vertex& y);

struct GreenRow {
  std::vector<double> values;
  double error_bound = 0.0;
  std::vector<int> radii;
};

/// g*(x, t) for every target t, by Richardson extrapolation in 1/r over cubes
/// of radius r centred at x.
GreenRow green_row_infinite(const LatticeGraph& graph, const Vertex& x, const std::vector<Vertex>& targets,
                            const Infinite& opts);

struct HittingResult {
  double p = 0.0;       // P_x[H_U < τ_D]
  DiscreteMeasure nu;   // P_x[H_U < τ_D, X_{H_U} = y]
};

/// Hitting law of U from x before leaving the domain (U ⊆ domain).
HittingResult hitting(const LatticeGraph& graph, const Vertex& x, const Region& U, const Region& domain,
                      double rel_tol = 1e-12);

/// z ↦ P_z[H_U < τ_D] on complement = D \ U.
std::vector<double> hitting_potential(const LatticeGraph& graph, const Region& U, const Region& complement,
                                      double rel_tol = 1e-12);

struct EquilibriumResult {
  DiscreteMeasure e;
  double cap = 0.0;
  /// |cap · E(ē) - 1| with E the energy under the domain's Green function.
  double identity_residual = 0.0;
};

/// e_D(y) = P_y[H̃_U > τ_D] and cap_D(U) = Σ e_D.
EquilibriumResult equilibrium_and_capacity(const LatticeGraph& graph, const Region& U, const Region& approx_domain);

struct CapacityValue {
  double cap = 0.0;
  double error_bound = 0.0;
};

/// cap*(U) extrapolated over cubes around U.
CapacityValue capacity_infinite(const LatticeGraph& graph, const Region& U, const Infinite& opts);

/// σ*_x(U) = sup_U g*(x,·) / inf_U g*(x,·).
double sigma_ratio(const LatticeGraph& graph, const Vertex& x, const Region& U, const Infinite& opts = {});
/// sup over x ∈ S.
double sigma_ratio(const LatticeGraph& graph, const Region& S, const Region& U, const Infinite& opts = {});

/// Largest r such that every vertex within graph distance r of U lies in the domain.
int margin(const LatticeGraph& graph, const Region& U, const Region& domain);
int graph_diameter(const LatticeGraph& graph, const Region& U);

}  // namespace ggl
