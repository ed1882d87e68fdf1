#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "ggl/energy_model.hpp"
#include "ggl/lattice.hpp"
#include "ggl/potentials.hpp"
#include "ggl/rng.hpp"
#include "ggl/stats.hpp"

namespace ggl {

enum class Method { HeatBath, Mala, Langevin, Exact };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct SamplerOptions {
  Method method = Method::HeatBath;
  std::size_t n_samples = 1000;
  /// Sweeps discarded before the first sample; nullopt means 10·diam(Λ)².
  std::optional<std::size_t> burn_in;
  std::size_t thinning = 1;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  /// MALA/Langevin step; 0 picks 0.5/(β c0 2|Γ|) from the curvature bound.
  double dt = 0.0;
  bool tune_dt = true;
  double target_acceptance = 0.6;
  double guard = 1e6;
  std::optional<std::vector<double>> init;
};

/// Samples stored row-major, one row per sample over the sorted region.
struct SampleStream {
  Region region;
  BoundaryCondition bc;
  std::vector<double> data;
  std::size_t n = 0;

  Method method = Method::HeatBath;
  std::size_t burn_in = 0;
  std::size_t thinning = 1;
  std::uint64_t seed = 0;
  double dt = 0.0;
  double acceptance = 1.0;

  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * region.size(), region.size()};
  }
  FieldConfig field(std::size_t i) const;
  /// Column of site x across samples.
  std::vector<double> site(const Vertex& x) const;
  void append(const std::vector<double>& phi);
};

/// Single-writer Markov chain targeting exp(-w H) for an EnergyModel.
struct ChainState {
  std::vector<double> phi;
  std::uint64_t step_count = 0;
  RngState rng;
  double dt = 0.0;
  std::uint64_t accepted = 0;
  std::uint64_t proposed = 0;
};

class Chain {
 public:
  Chain(const EnergyModel& model, Method method, std::vector<double> init, std::uint64_t seed,
        std::uint64_t stream, double dt, double guard);
  Chain(const EnergyModel& model, Method method, ChainState state, double guard);

  /// One sweep: |Λ| single-site updates, or one global MALA/Langevin move.
  void sweep();
  /// Adjust dt toward the target acceptance from the recent window.
  void tune(double target);

  const std::vector<double>& phi() const { return state_.phi; }
  const ChainState& state() const;
  double acceptance() const;
  double dt() const { return state_.dt; }

 private:
  void heat_bath_site(std::size_t i);
  void mala_step(bool metropolis);
  void check_guard() const;

  const EnergyModel& model_;
  Method method_;
  mutable ChainState state_;
  Rng rng_;
  double guard_;
  std::vector<double> grad_, prop_, prop_grad_;
  double energy_ = 0.0;
  bool energy_valid_ = false;
  std::uint64_t window_acc_ = 0, window_prop_ = 0;
};

double default_dt(const EnergyModel& model);
std::size_t default_burn_in(const Region& region);

SampleStream sample_gibbs(const PotentialSpec& potential, const LatticeGraph& graph, const Region& region,
                          const BoundaryCondition& bc, const SamplerOptions& opts);
SampleStream sample_model(const EnergyModel& model, const BoundaryCondition& bc, const SamplerOptions& opts);

/// Exact Gaussian law N(m, Q⁻¹) from a sparse precision (row, col, value)
/// with Q m = b, factored by sparse Cholesky.
class GaussianField {
 public:
  GaussianField(std::size_t n, const std::vector<std::tuple<int, int, double>>& precision,
                const std::vector<double>& linear);
  ~GaussianField();
  GaussianField(GaussianField&&) noexcept;
  GaussianField& operator=(GaussianField&&) noexcept;

  std::size_t size() const { return n_; }
  const std::vector<double>& mean() const { return mean_; }
  void sample(Rng& rng, std::vector<double>& out) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::size_t n_;
  std::vector<double> mean_;
};

/// Precision of the killed Gaussian free field: β k (|Γ| I - adjacency).
GaussianField dirichlet_gaussian(const LatticeGraph& graph, const Region& region, const BoundaryCondition& bc,
                                 double stiffness, double beta);

SampleStream gaussian_exact_sample(const LatticeGraph& graph, const Region& region, const BoundaryCondition& bc,
                                   double stiffness, std::size_t n, std::uint64_t seed, double beta = 1.0,
                                   std::size_t max_sites = 4000);

/// Exact joint law of the killed Gaussian field restricted to a few sites,
/// with covariance columns from CG solves and a dense Cholesky factor.
class GaussianMarginal {
 public:
  GaussianMarginal(const LatticeGraph& graph, const Region& region, const BoundaryCondition& bc, double stiffness,
                   double beta, Region sites);
  ~GaussianMarginal();
  GaussianMarginal(GaussianMarginal&&) noexcept;
  GaussianMarginal& operator=(GaussianMarginal&&) noexcept;

  const Region& sites() const { return sites_; }
  double covariance(std::size_t i, std::size_t j) const;
  const std::vector<double>& mean() const { return mean_; }
  void sample(Rng& rng, std::vector<double>& out) const;
  SampleStream sample_stream(std::size_t n, std::uint64_t seed, std::uint64_t stream = 0) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  Region sites_;
  std::vector<double> mean_;
};

struct Estimate {
  double mean = 0.0;
  double se = 0.0;
  double tau = 1.0;
};

Estimate estimate_observable(const SampleStream& stream, const std::function<double(std::span<const double>)>& f);

}  // namespace ggl
