#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ggl/lattice.hpp"

namespace ggl {

enum class PotentialKind { Quadratic, LogCosh, DoubleWell, BumpWell, Custom, EffectiveEven };

std::string to_string(PotentialKind kind);

class EffectiveEvenPotential;

/// A gradient potential. Two-body kinds expose V, V', V'' of a single edge
/// gradient; the effective even kind is a function of 2d heights.
struct PotentialSpec {
  PotentialKind kind = PotentialKind::Quadratic;
  std::string name = "quadratic";
  double beta = 1.0;

  double stiffness = 1.0;       // quadratic k, or U = k η²/2 for the bump well
  double bump_amplitude = 0.0;  // g = a (1 - (η/r)²)³ on |η| < r
  double bump_radius = 1.0;

  /// Declared bounds on V''. For convex kinds c0 = max(d2v_hi, 1/d2v_lo).
  double d2v_lo = 1.0;
  double d2v_hi = 1.0;
  double c0 = 1.0;
  bool convex = true;

  /// Integrability: V(η) >= A η² - B.
  double A = 0.5;
  double B = 0.0;

  std::function<double(double)> custom_v, custom_dv, custom_d2v;
  std::shared_ptr<const EffectiveEvenPotential> effective;

  static PotentialSpec quadratic(double stiffness = 1.0, double beta = 1.0);
  /// V = η²/2 + log cosh η.
  static PotentialSpec log_cosh(double beta = 1.0);
  /// e^{-V} = (η² + 1/2) e^{-η²}, split as U = η², g = -log(η² + 1/2).
  static PotentialSpec double_well(double beta = 1.0);
  /// U = k η²/2 plus the compact bump a (1 - (η/r)²)³.
  static PotentialSpec bump_well(double stiffness, double amplitude, double radius, double beta = 1.0);
  static PotentialSpec custom(std::string name, std::function<double(double)> v, std::function<double(double)> dv,
                              std::function<double(double)> d2v, double d2v_lo, double d2v_hi, bool convex,
                              double A, double B, double beta = 1.0);

  bool two_body() const { return kind != PotentialKind::EffectiveEven; }
  PotentialSpec with_beta(double b) const;

  double v(double eta) const;
  double dv(double eta) const;
  double d2v(double eta) const;

  /// Convex part U and perturbation g of V = U + g (g = 0 for convex kinds).
  double u(double eta) const;
  double g(double eta) const;
  double d2g(double eta) const;
  /// g has compact support inside [-r, r]; nullopt if unbounded or g = 0.
  std::optional<double> g_support() const;
};

/// Heights outside the region. Unlisted vertices read the default constant.
struct BoundaryCondition {
  double constant = 0.0;
  std::unordered_map<Vertex, double, VertexHash> values;

  static BoundaryCondition constant_value(double c) { return BoundaryCondition{c, {}}; }
  double value(const Vertex& x) const {
    auto it = values.find(x);
    return it == values.end() ? constant : it->second;
  }
  BoundaryCondition shifted(double c) const;
  BoundaryCondition negated() const;
};

struct FieldConfig {
  Region region;
  std::vector<double> heights;
  BoundaryCondition bc;

  FieldConfig() = default;
  FieldConfig(Region r, std::vector<double> h, BoundaryCondition b);
  static FieldConfig constant(Region r, double value, BoundaryCondition b);

  /// φ on the region, ξ elsewhere.
  double at(const Vertex& x) const;
  void validate() const;
};

struct EnergyGrad {
  double energy = 0.0;
  std::vector<double> gradient;
};

/// H^ξ_Λ(φ) with bc-only terms dropped, and ∂H/∂φ_x for x ∈ Λ. For the
/// effective even kind the field lives on Λ_e and graph is the nearest-
/// neighbour graph of Z^d.
EnergyGrad hamiltonian_and_grad(const PotentialSpec& potential, const LatticeGraph& graph, const FieldConfig& field);

/// -∂²_{x,y} H at the field.
double conductance(const PotentialSpec& potential, const LatticeGraph& graph, const FieldConfig& field,
                   const Vertex& x, const Vertex& y);

struct ConvexityGrid {
  double lo = -20.0;
  double hi = 20.0;
  double step = 0.01;
};

struct ConvexityReport {
  double c0_lower = 0.0;
  double c0_upper = 0.0;
  /// Grid points (two-body) or probe indices (effective) outside [1/c0, c0].
  std::vector<double> violations;
};

ConvexityReport check_convexity(const PotentialSpec& potential, const ConvexityGrid& grid = {});

// ---------------------------------------------------------------------------

/// Ṽ_β(η) = -log ∫ exp(-β Σ_i V(η_i - s)) ds over n = 2d heights.
class EffectiveEvenPotential {
 public:
  EffectiveEvenPotential(PotentialSpec base, double beta, double tol, int dim, bool closed_form = true);

  const PotentialSpec& base() const { return base_; }
  double beta() const { return beta_; }
  double tol() const { return tol_; }
  int dim() const { return dim_; }
  int arity() const { return 2 * dim_; }
  bool uses_closed_form() const { return closed_form_; }

  double value(const double* eta) const;
  /// Value with gradient (size n) and optional Hessian (n×n row-major).
  double evaluate(const double* eta, double* grad, double* hess = nullptr) const;

  /// Closed form for a quadratic base; throws MethodUnsupported otherwise.
  double gaussian_value(const double* eta) const;
  /// ∂²_{ii} Ṽ, which is constant when the base is quadratic.
  std::optional<double> diagonal_curvature() const;

 private:
  double integrate(const double* eta, double* grad, double* hess) const;

  PotentialSpec base_;
  double beta_;
  double tol_;
  int dim_;
  bool closed_form_;
};

PotentialSpec effective_even_potential(const PotentialSpec& base, double beta, double tol, int dim = 3,
                                       bool closed_form = true);

}  // namespace ggl
