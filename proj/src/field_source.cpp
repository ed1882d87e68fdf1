#include "ggl/field_source.hpp"

#include <memory>

namespace ggl {

FieldSource gaussian_marginal_source(const LatticeGraph& graph, const Region& region, const BoundaryCondition& bc,
                                     double stiffness, double beta, const Region& sites) {
  auto marginal = std::make_shared<GaussianMarginal>(graph, region, bc, stiffness, beta, sites);
  FieldSource src;
  src.sites = sites;
  src.bc = bc;
  src.independent = true;
  src.description = "exact gaussian marginal";
  src.draw = [marginal, bc](std::size_t n, std::uint64_t seed) {
    SampleStream s = marginal->sample_stream(n, seed);
    s.bc = bc;
    return s;
  };
  return src;
}

FieldSource gaussian_full_source(const LatticeGraph& graph, const Region& region, const BoundaryCondition& bc,
                                 double stiffness, double beta) {
  auto field = std::make_shared<GaussianField>(dirichlet_gaussian(graph, region, bc, stiffness, beta));
  FieldSource src;
  src.sites = region;
  src.bc = bc;
  src.independent = true;
  src.description = "exact gaussian";
  src.draw = [field, region, bc](std::size_t n, std::uint64_t seed) {
    SampleStream s;
    s.region = region;
    s.bc = bc;
    s.method = Method::Exact;
    s.seed = seed;
    Rng rng(seed, 0);
    std::vector<double> x;
    s.data.reserve(n * region.size());
    for (std::size_t k = 0; k < n; ++k) {
      field->sample(rng, x);
      s.append(x);
    }
    return s;
  };
  return src;
}

FieldSource mcmc_source(const PotentialSpec& potential, const LatticeGraph& graph, const Region& region,
                        const BoundaryCondition& bc, const SamplerOptions& opts) {
  FieldSource src;
  src.sites = region;
  src.bc = bc;
  src.independent = false;
  src.description = to_string(opts.method) + " chain";
  auto model = std::shared_ptr<EnergyModel>(make_energy_model(potential, graph, region, bc));
  src.draw = [model, bc, opts](std::size_t n, std::uint64_t seed) {
    SamplerOptions o = opts;
    o.n_samples = n;
    o.seed = seed;
    return sample_model(*model, bc, o);
  };
  return src;
}

MeanSe estimate_mean(std::span<const double> values, bool independent) {
  if (independent) return mean_se(values);
  const BatchMeans bm = batch_means(values);
  return {bm.mean, bm.se};
}

}  // namespace ggl
