#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "ggl/green.hpp"
#include "ggl/lattice.hpp"
#include "ggl/potentials.hpp"
#include "ggl/stats.hpp"

namespace ggl {

enum class WalkStatus { HitTarget, ExitedDomain, Horizon };

struct WalkPath {
  std::vector<double> times;     // times[0] = 0, one entry per visited vertex
  std::vector<Vertex> vertices;
  WalkStatus status = WalkStatus::Horizon;
  /// Extremes of the realized jump rates (NaN-free only if a jump occurred).
  double min_rate = std::numeric_limits<double>::infinity();
  double max_rate = -std::numeric_limits<double>::infinity();
  std::size_t proposals = 0;
};

/// Environment record: the field on Λ′ at the start and end, plus optional
/// snapshots at every dt slab.
struct EnvironmentTrajectory {
  Region region;
  BoundaryCondition bc;
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::size_t steps = 0;
  bool evolved = false;  // false when conductances do not depend on the field
  std::vector<double> initial, final;
  std::vector<double> snapshot_times;
  std::vector<std::vector<double>> snapshots;
};

struct PairOptions {
  double dt = 0.0;  // 0 picks the sampler default for Λ′
  double horizon = std::numeric_limits<double>::infinity();
  bool record_snapshots = false;
  bool record_path = true;
  double guard = 1e6;
};

/// Runs the coupled walk and environment from (x0, φ0) until X enters S′,
/// leaves Λ, or time exceeds the horizon. φ0 lives on Λ′ = Λ \ S′; every
/// height off Λ′ is read from bc.
std::pair<WalkPath, EnvironmentTrajectory> simulate_pair(const PotentialSpec& potential, const LatticeGraph& graph,
                                                         const Region& lambda, const Region& target,
                                                         const BoundaryCondition& bc, const Vertex& x0,
                                                         const std::vector<double>& phi0, std::uint64_t seed,
                                                         std::uint64_t stream, const PairOptions& opts = {});

enum class InitPolicy { Stationary, Given };

struct HitOptions {
  InitPolicy init = InitPolicy::Stationary;
  std::vector<double> given;  // field on Λ′ when init = Given
  double dt = 0.0;
  /// Chain sweeps between the stationary fields handed to successive paths.
  std::size_t thinning = 2;
  std::optional<std::size_t> burn_in;
  std::size_t workers = 1;
};

struct HitEstimate {
  double p = 0.0;
  double se = 0.0;
  std::size_t reps = 0;
  std::size_t hits = 0;
  double min_rate = std::numeric_limits<double>::infinity();
  double max_rate = -std::numeric_limits<double>::infinity();
  std::vector<std::uint8_t> indicators;
};

/// Monte Carlo estimate of P[H_{S′} < H_{Λᶜ}] for the walk started at x0.
HitEstimate hit_before_exit(const PotentialSpec& potential, const LatticeGraph& graph, const Region& lambda,
                            const Region& target, const BoundaryCondition& bc, const Vertex& x0, std::size_t n_reps,
                            std::uint64_t seed, const HitOptions& opts = {});

/// W(p) = p / (1 - p); DegenerateW for p ≥ 1 - 1e-9.
double cross_section_w(double p);

struct CrossSectionRow {
  Vertex x{};
  double bc_value = 0.0;
  std::size_t env = 0;
  double p = 0.0;
  double se = 0.0;
  double w = 0.0;
};

struct CrossSectionResult {
  double sigma = 0.0;
  Interval ci;
  std::vector<CrossSectionRow> rows;
  /// Gaussian comparison reference: sup_x W(SRW hitting probability).
  double sigma_srw = 0.0;
};

struct CrossSectionOptions {
  /// Constant boundary values ξ ≡ m tried in addition to the stationary fields.
  std::vector<double> bc_values{0.0};
  std::size_t n_env = 1;
  double dt = 0.0;
  std::size_t bootstrap = 400;
  std::size_t workers = 1;
};

CrossSectionResult cross_section(const PotentialSpec& potential, const LatticeGraph& graph, const Region& S,
                                 const Region& target, const Region& lambda, std::size_t n_paths, std::uint64_t seed,
                                 const CrossSectionOptions& opts = {});

struct SrwComparison {
  double p_env = 0.0;
  double se_env = 0.0;
  double p_srw = 0.0;
  double ratio = 0.0;
  double sigma_x = 1.0;
  double lower = 0.0;
  double upper = 0.0;
  bool within = false;
};

/// Ratio of the annealed hitting probability to the SRW one against the
/// bracket [1/(K σ*_x(U)), K σ*_x(U)].
SrwComparison compare_to_srw(const PotentialSpec& potential, const LatticeGraph& graph, const Vertex& x,
                             const Region& U, const Region& lambda, std::size_t n, std::uint64_t seed, double K = 50.0,
                             const HitOptions& opts = {});

}  // namespace ggl
