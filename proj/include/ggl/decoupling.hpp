#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ggl/events.hpp"
#include "ggl/field_source.hpp"
#include "ggl/green.hpp"
#include "ggl/lattice.hpp"
#include "ggl/potentials.hpp"

namespace ggl {

/// Placeholders for constants that are only known to exist. All positive;
/// echoed into every manifest.
struct ConstantsConfig {
  double c0 = 1.0;
  double c1 = 1.0;
  double c2 = 1.0;
  double c14 = 1.0;
  double c15 = 1.0;
  double c21 = 1.0;
  double c24 = 1.0;
  double K_decouple = 1.0;
  double K = 50.0;

  void validate() const;
};

/// δ = c1 |S| exp{|∂ᵢS′| − c2 [cap/(σ² |∂ᵢS′|) · ε/Σ]²}.
double error_term_formula(double c1, double c2, double size_S, double inner_boundary, double cap, double sigma,
                          double eps, double Sigma);

struct ErrorTermInputs {
  double size_S = 0.0;
  double inner_boundary = 0.0;
  double cap = 0.0;
  double sigma = 1.0;
};

/// |S|, |∂ᵢS′|, cap*(S′) and σ*(S, S′) for the error term.
ErrorTermInputs error_term_inputs(const LatticeGraph& graph, const Region& S, const Region& target,
                                  const Infinite& opts = {});
double error_term(const ConstantsConfig& constants, const ErrorTermInputs& in, double eps, double Sigma);
double error_term(const ConstantsConfig& constants, const LatticeGraph& graph, const Region& S, const Region& target,
                  double eps, double Sigma);

/// M = ε (1/Σ + 1).
double sprinkling_threshold(double eps, double Sigma);

/// Bounded nonnegative observable of the heights on S′.
struct Observable {
  enum class Kind { Indicator, ClippedSum };
  Kind kind = Kind::Indicator;
  MonotoneEvent event = MonotoneEvent::any_of({});
  double level = 0.0;
  std::vector<Vertex> sites;
  std::vector<double> weights;  // nonnegative, ClippedSum only
  double cap = 1.0;

  static Observable indicator(MonotoneEvent e, double level);
  /// min(cap, max(0, Σ w_i φ_i)); increasing since w ≥ 0.
  static Observable clipped_sum(std::vector<Vertex> sites, std::vector<double> weights, double cap);

  Region support() const;
  double sup_norm() const { return kind == Kind::Indicator ? 1.0 : cap; }
  bool increasing() const { return true; }
};

struct Estimated {
  double value = 0.0;
  double se = 0.0;
};

struct DecouplingReport {
  double h = 0.0;
  double eps = 0.0;
  std::size_t n = 0;
  Estimated lhs, mu_A_h, mu_A_sprinkled, mean_f;
  double sigma_hat = 0.0;
  double delta = 0.0;
  double M = 0.0;
  double upper = 0.0, upper_se = 0.0;
  double lower = 0.0, lower_se = 0.0;
  bool has_lower = false;
  bool upper_ok = false, lower_ok = false, pass = false;
  ErrorTermInputs inputs;
};

struct DecouplingOptions {
  ConstantsConfig constants;
  /// Σ̂ to use; when absent it is the SRW value (exact for the quadratic
  /// potential, whose walk ignores the environment).
  std::optional<double> sigma;
  std::optional<ErrorTermInputs> inputs;
};

/// Estimates E[1_{A^h} f], the sprinkled upper bound and the FKG lower bound
/// from `n` draws of `source` (whose sites must cover both supports).
DecouplingReport decoupling_experiment(const FieldSource& source, const LatticeGraph& graph, const Region& lambda,
                                       const Region& S, const Region& target, const MonotoneEvent& A,
                                       const Observable& f, double h, double eps, std::size_t n, std::uint64_t seed,
                                       const DecouplingOptions& opts = {});

/// Same, for a grid of ε on one shared set of samples.
std::vector<DecouplingReport> decoupling_experiment(const FieldSource& source, const LatticeGraph& graph,
                                                    const Region& lambda, const Region& S, const Region& target,
                                                    const MonotoneEvent& A, const Observable& f, double h,
                                                    const std::vector<double>& eps_grid, std::size_t n,
                                                    std::uint64_t seed, const DecouplingOptions& opts = {});

/// sup_x∈S W(P_x[H_{S′} < τ_Λ]) for simple random walk.
double srw_cross_section(const LatticeGraph& graph, const Region& S, const Region& target, const Region& lambda);

struct BrascampLiebReport {
  Estimated lhs;     // E[exp⟨ν, φ - Eφ⟩]
  double rhs = 0.0;  // exp(½ c0 ⟨ν, g_Λ ν⟩ / (β|Γ|))
  double variance_bound = 0.0;
  double z = 0.0;    // (lhs - rhs)/se
  bool pass = false;
};

/// Brascamp–Lieb exponential moment check against the Gaussian comparison
/// field with covariance c0 g_Λ/(β|Γ|).
BrascampLiebReport brascamp_lieb_check(const PotentialSpec& potential, const LatticeGraph& graph,
                                       const Region& lambda, const DiscreteMeasure& nu, const FieldSource& source,
                                       std::size_t n, std::uint64_t seed);

}  // namespace ggl
