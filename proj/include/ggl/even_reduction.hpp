#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ggl/energy_model.hpp"
#include "ggl/lattice.hpp"
#include "ggl/potentials.hpp"
#include "ggl/sampler.hpp"

namespace ggl {

/// Even/odd split of an F* region together with both boundaries.
struct RegionSplit {
  Region full;
  Region even;
  Region odd;
  Region boundary;       // ∂Λ in the nearest-neighbour graph
  Region even_boundary;  // ∂̃Λ_e in the even graph
  bool boundaries_agree = false;
};

/// Throws NotFStar naming the first even vertex with a neighbour outside Λ.
RegionSplit reduce_region(const Region& lambda, int dim);

/// Smallest F* superset: Λ plus the neighbours of its even vertices.
Region f_star_hull(const Region& lambda, int dim);

struct EvenReduction {
  RegionSplit split;
  PotentialSpec effective;
  double beta = 1.0;

  static EvenReduction build(const PotentialSpec& base, double beta, const Region& lambda, double tol = 1e-10,
                             bool closed_form = true);
  EvenModel model(const BoundaryCondition& bc) const;
};

struct MarginalOptions {
  std::size_t n = 20000;
  std::uint64_t seed = 0;
  double alpha = 0.01;
  BoundaryCondition bc;
  double tol = 1e-10;
  /// Effective-model β; differs from the full β only for negative controls.
  std::optional<double> even_beta;
  std::optional<Method> full_method;
  std::optional<Method> even_method;
  std::optional<std::size_t> burn_in;
  std::size_t thinning = 1;
};

struct SiteComparison {
  Vertex site{};
  double ks = 0.0;
  double critical = 0.0;
  double ess_full = 0.0, ess_even = 0.0;
  double mean_full = 0.0, mean_even = 0.0;
  double var_full = 0.0, var_even = 0.0;
  bool pass = false;
};

struct MomentComparison {
  Vertex a{}, b{};
  double full = 0.0, full_se = 0.0;
  double even = 0.0, even_se = 0.0;
  double z = 0.0;
};

struct MarginalReport {
  Method full_method = Method::Exact;
  Method even_method = Method::Exact;
  double alpha_per_site = 0.0;
  std::vector<SiteComparison> sites;
  std::vector<MomentComparison> moments;
  double moment_z_critical = 0.0;
  bool moments_pass = false;
  std::vector<std::string> warnings;
  /// Every per-site KS statistic below its critical value.
  bool pass = false;
};

/// Compares the even-site marginals of the full model on Λ with the
/// effective even model on Λ_e. KS levels are Bonferroni-split over sites
/// and critical values use effective sample sizes.
MarginalReport marginal_agreement_test(const PotentialSpec& base, double beta, const Region& lambda,
                                       const std::vector<Vertex>& sites, const MarginalOptions& opts);

/// ∫_a^b |f| by adaptive quadrature.
double l1_norm(const std::function<double(double)>& f, double a, double b, double tol = 1e-10);

/// ‖g″‖_{L¹(R)} of the perturbation of V = U + g. Compactly supported g is
/// integrated exactly over its support; the double well over [-X, X] plus
/// its 4/X tail.
double perturbation_curvature_norm(const PotentialSpec& base, double tol = 1e-10);

struct WindowRow {
  double beta = 0.0;
  bool convex = false;
  double conductance_lo = 0.0, conductance_hi = 0.0;
  double scaling = 0.0;  // √β ‖g″‖
};

struct WindowReport {
  double g_norm = 0.0;
  std::vector<WindowRow> rows;
  /// Largest β with every grid point up to it passing; nullopt if the first fails.
  std::optional<double> edge;
};

WindowReport convexity_window(const PotentialSpec& base, const std::vector<double>& betas,
                              const ConvexityGrid& grid = {-6.0, 6.0, 0.01}, double tol = 1e-9);

/// Even vertices of a path with repeats collapsed; a nearest-neighbour path
/// maps to a path in the even graph.
std::vector<Vertex> even_trace(const std::vector<Vertex>& path);

/// x̂ = x for even x, x + e₁ otherwise.
Vertex even_projection(const Vertex& x);

struct TightnessRow {
  int radius = 0;
  double mean = 0.0;
  double se = 0.0;
};

struct TightnessReport {
  std::vector<TightnessRow> rows;
  /// Last increment not larger than the first one, one-sided at 3σ; needs three radii.
  bool bounded = false;
};

/// E[exp φ_0] under the effective even model on F* hulls of cubes of the
/// given radii.
TightnessReport tightness_proxy(const PotentialSpec& base, double beta, const std::vector<int>& radii, std::size_t n,
                                std::uint64_t seed, int dim = 3);

}  // namespace ggl
