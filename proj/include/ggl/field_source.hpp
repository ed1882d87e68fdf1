#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ggl/lattice.hpp"
#include "ggl/potentials.hpp"
#include "ggl/sampler.hpp"

namespace ggl {

/// A way to draw field samples on a fixed set of sites. Rows of the returned
/// stream follow the sorted order of `sites`.
struct FieldSource {
  Region sites;
  BoundaryCondition bc;
  /// True when rows are independent draws; false for Markov chain output.
  bool independent = true;
  std::string description;
  std::function<SampleStream(std::size_t n, std::uint64_t seed)> draw;
};

/// Exact killed Gaussian field on `region`, observed on `sites`.
FieldSource gaussian_marginal_source(const LatticeGraph& graph, const Region& region, const BoundaryCondition& bc,
                                     double stiffness, double beta, const Region& sites);
/// Exact killed Gaussian field on all of `region` (sparse Cholesky).
FieldSource gaussian_full_source(const LatticeGraph& graph, const Region& region, const BoundaryCondition& bc,
                                 double stiffness, double beta);
/// Markov chain samples of the Gibbs measure on `region`.
FieldSource mcmc_source(const PotentialSpec& potential, const LatticeGraph& graph, const Region& region,
                        const BoundaryCondition& bc, const SamplerOptions& opts);

/// Mean and standard error, by batch means when rows are correlated.
MeanSe estimate_mean(std::span<const double> values, bool independent);

}  // namespace ggl
