#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ggl/decoupling.hpp"
#include "ggl/events.hpp"
#include "ggl/field_source.hpp"
#include "ggl/lattice.hpp"

namespace ggl {

/// Connected components of the occupied vertices of a region.
struct ClusterLabeling {
  Region region;
  std::vector<std::uint8_t> occupied;
  /// Component id per vertex in region order, -1 if vacant. Ids are compact
  /// and numbered by their first vertex.
  std::vector<std::int32_t> label;
  std::vector<std::size_t> sizes;
  std::vector<Vertex> steps;

  std::size_t count() const { return sizes.size(); }
  std::size_t largest() const;
};

ClusterLabeling clusters(const LatticeGraph& graph, const Region& region, const std::vector<std::uint8_t>& occupied);
/// Level set {φ ≥ h} of the field restricted to its region.
ClusterLabeling clusters(const LatticeGraph& graph, const FieldConfig& field, double h);

/// Graph distance inside the occupied set; nullopt when not connected.
std::optional<int> chemical_distance(const ClusterLabeling& labels, const Vertex& x, const Vertex& y);

struct LevelEstimate {
  double h = 0.0;
  double p = 0.0;
  double se = 0.0;
};

/// μ(x ↔ y in {φ ≥ h}) inside the sampled region, for every h on one sample set.
std::vector<LevelEstimate> connectivity(const FieldSource& source, const LatticeGraph& graph, const Vertex& x,
                                        const Vertex& y, const std::vector<double>& hs, std::size_t n,
                                        std::uint64_t seed);
LevelEstimate connectivity(const FieldSource& source, const LatticeGraph& graph, const Vertex& x, const Vertex& y,
                           double h, std::size_t n, std::uint64_t seed);

/// Per-sample bottleneck levels of {B(y, L) ↔ ∂B(y, 2L)}: the crossing holds
/// at h iff h ≤ level.
std::vector<double> crossing_levels(const SampleStream& stream, const LatticeGraph& graph, const Vertex& y, int L);

std::vector<LevelEstimate> crossing_probability(const FieldSource& source, const LatticeGraph& graph,
                                                const Vertex& y, int L, const std::vector<double>& hs,
                                                std::size_t n, std::uint64_t seed);
LevelEstimate crossing_probability(const FieldSource& source, const LatticeGraph& graph, const Vertex& y, int L,
                                   double h, std::size_t n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Renormalization scheme

/// Length scales L_k = base · R^k. The strict scheme has base 100 and
/// R ≥ 100²; desk-scale runs shrink base (and the separation divisor with it).
struct Scales {
  int base = 100;
  int R = 10000;
  bool strict = true;

  long long L(int k) const;
  /// Separation divisor in d(B̃_{m0}, B̃_{m1}) ≥ L/divisor.
  int divisor() const { return base; }
  void validate() const;
};

enum class EmbeddingVariant { Xi, XiStar };

/// τ: T_n → Z^d in heap order (node 0 is the root, children of i are 2i+1
/// and 2i+2; child 2i+1 is "m0").
struct ProperEmbedding {
  Vertex x0{};
  int depth = 0;
  int dim = 3;
  Scales scales;
  EmbeddingVariant variant = EmbeddingVariant::Xi;
  std::vector<Vertex> tau;

  static int level_of(std::size_t node);
  /// Radius of B̃_{τ(m)}: 10 L_{n-k}.
  long long ball_radius(std::size_t node) const;
  std::vector<std::size_t> leaves() const;
};

/// Re-checks every defining constraint; returns a description of the first
/// violation or nullopt.
std::optional<std::string> validate_embedding(const ProperEmbedding& tau);

/// budget caps the embeddings returned; BudgetExceeded is also raised up front
/// when a node has more than 1000 x budget candidate child pairs.
struct EnumerateMode {
  std::size_t budget = 1000;
};
struct SampleMode {
  std::size_t k = 1;
  std::uint64_t seed = 0;
};

std::vector<ProperEmbedding> proper_embeddings(const Vertex& x0, int n, const Scales& scales,
                                               const LatticeGraph& graph, EmbeddingVariant variant,
                                               const EnumerateMode& mode);
std::vector<ProperEmbedding> proper_embeddings(const Vertex& x0, int n, const Scales& scales,
                                               const LatticeGraph& graph, EmbeddingVariant variant,
                                               const SampleMode& mode);

/// ε_n = c14 (2^{2n}/R^{n+1})^{1/2} and δ_n = exp(-c15 √R^{n+1}).
double renorm_eps(const ConstantsConfig& c, int n, double R);
double renorm_delta(const ConstantsConfig& c, int n, double R);

struct RenormReport {
  int n = 0;
  double h = 0.0, eps = 0.0, eps_n = 0.0, delta_n = 0.0;
  Estimated lhs, left, right;
  double product = 0.0, product_se = 0.0;
  bool pass = false;
};

/// One-step check μ[∩ A^h] ≤ μ[∩_{0m} A^{h-ε}] μ[∩_{1m} A^{h-ε}] + δ_n for
/// increasing leaf events adapted to τ (one per leaf, leaves in heap order).
RenormReport renorm_step_check(const FieldSource& source, const ProperEmbedding& tau,
                               const std::vector<MonotoneEvent>& leaf_events, double h, double eps,
                               std::size_t n_samples, const ConstantsConfig& constants, std::uint64_t seed);
/// Same on an already drawn stream, so several (h, ε) share one sample set.
RenormReport renorm_step_check(const SampleStream& stream, bool independent, const ProperEmbedding& tau,
                               const std::vector<MonotoneEvent>& leaf_events, double h, double eps,
                               const ConstantsConfig& constants);

struct DecayFit {
  bool valid = false;
  double log_c = 0.0;
  double c_prime = 0.0;
  double rho = 0.0;
  double rss = 0.0;
  std::size_t points = 0;
};

/// Fits log p ≈ log c - c′ L^ρ with ρ scanned over (0, 1].
DecayFit fit_stretched_exponential(const std::vector<double>& Ls, const std::vector<double>& ps);

struct ScanReport {
  std::vector<double> hs;
  std::vector<int> Ls;
  /// p[i][j] at hs[i], Ls[j].
  std::vector<std::vector<LevelEstimate>> p;
  std::vector<DecayFit> fits;  // one per h
  bool monotone_in_h = true;
};

ScanReport h_plus_scan(const FieldSource& source, const LatticeGraph& graph, const Vertex& center,
                       const std::vector<double>& hs, const std::vector<int>& Ls, std::size_t n, std::uint64_t seed);

}  // namespace ggl
