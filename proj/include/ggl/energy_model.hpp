#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <tuple>
#include <vector>

#include "ggl/lattice.hpp"
#include "ggl/potentials.hpp"

namespace ggl {

/// Local energy of one site as a function of its own height.
struct LocalEnergy {
  double e = 0.0;
  double de = 0.0;
  double d2e = 0.0;
};

/// Precomputed interaction structure of a Hamiltonian on a finite region.
/// The Gibbs density is exp(-weight() · H).
class EnergyModel {
 public:
  virtual ~EnergyModel() = default;

  const Region& region() const { return region_; }
  std::size_t size() const { return region_.size(); }
  virtual double weight() const = 0;

  virtual double energy(const std::vector<double>& phi) const = 0;
  virtual double energy_and_gradient(const std::vector<double>& phi, std::vector<double>& grad) const = 0;
  virtual void gradient(const std::vector<double>& phi, std::vector<double>& grad) const {
    energy_and_gradient(phi, grad);
  }
  virtual LocalEnergy local(std::size_t i, double t, const std::vector<double>& phi) const = 0;
  virtual double local_value(std::size_t i, double t, const std::vector<double>& phi) const {
    return local(i, t, phi).e;
  }
  /// Lower bound on d2e for site i, if one is known.
  virtual std::optional<double> curvature_lower(std::size_t i) const = 0;
  virtual double curvature_upper(std::size_t i) const = 0;
  /// Largest site degree of the interaction graph.
  virtual std::size_t max_degree() const = 0;

 protected:
  explicit EnergyModel(Region region) : region_(std::move(region)) {}
  Region region_;
};

/// Slot table: neighbour k of site i is region index nb[i*deg+k] or, if that
/// is -1, the boundary value bc[i*deg+k].
struct NeighborTable {
  std::size_t degree = 0;
  std::vector<std::int32_t> index;
  std::vector<double> bc;

  static NeighborTable build(const LatticeGraph& graph, const Region& region, const BoundaryCondition& bc);
  double value(std::size_t i, std::size_t k, const std::vector<double>& phi) const {
    const std::int32_t j = index[i * degree + k];
    return j >= 0 ? phi[static_cast<std::size_t>(j)] : bc[i * degree + k];
  }
};

class TwoBodyModel final : public EnergyModel {
 public:
  TwoBodyModel(PotentialSpec potential, const LatticeGraph& graph, Region region, const BoundaryCondition& bc);

  double weight() const override { return potential_.beta; }
  double energy(const std::vector<double>& phi) const override;
  double energy_and_gradient(const std::vector<double>& phi, std::vector<double>& grad) const override;
  void gradient(const std::vector<double>& phi, std::vector<double>& grad) const override;
  LocalEnergy local(std::size_t i, double t, const std::vector<double>& phi) const override;
  double local_value(std::size_t i, double t, const std::vector<double>& phi) const override;
  std::optional<double> curvature_lower(std::size_t i) const override;
  double curvature_upper(std::size_t i) const override;
  std::size_t max_degree() const override { return table_.degree; }

  const PotentialSpec& potential() const { return potential_; }
  const NeighborTable& table() const { return table_; }
  const LatticeGraph& graph() const { return graph_; }
  /// a = V''(φ_y - φ_x) on slot k of site i.
  double edge_conductance(std::size_t i, std::size_t k, const std::vector<double>& phi) const;
  bool constant_conductance() const { return potential_.kind == PotentialKind::Quadratic; }

 private:
  PotentialSpec potential_;
  LatticeGraph graph_;
  NeighborTable table_;
};

/// Σ over odd y adjacent to Λ_e of Ṽ_β(heights of the 2d neighbours of y).
class EvenModel final : public EnergyModel {
 public:
  EvenModel(PotentialSpec effective, Region even_region, const BoundaryCondition& bc);

  double weight() const override { return 1.0; }
  double energy(const std::vector<double>& phi) const override;
  double energy_and_gradient(const std::vector<double>& phi, std::vector<double>& grad) const override;
  LocalEnergy local(std::size_t i, double t, const std::vector<double>& phi) const override;
  std::optional<double> curvature_lower(std::size_t i) const override;
  double curvature_upper(std::size_t i) const override;
  std::size_t max_degree() const override;

  std::size_t factor_count() const { return factor_sites_.size() / arity_; }
  const std::vector<Vertex>& odd_sites() const { return odd_sites_; }
  /// Sparse Hessian of H as (row, col, value) for a quadratic base.
  std::vector<std::tuple<int, int, double>> quadratic_hessian() const;
  /// Linear term b with H = ½ φᵀQφ - bᵀφ + const (quadratic base).
  std::vector<double> quadratic_linear_term() const;

 private:
  void gather(std::size_t f, const std::vector<double>& phi, double* eta) const;

  PotentialSpec potential_;
  const EffectiveEvenPotential* ev_;
  std::size_t arity_;
  std::vector<Vertex> odd_sites_;
  std::vector<std::int32_t> factor_sites_;  // factor f slot s -> site or -1
  std::vector<double> factor_bc_;
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> site_factors_;  // (factor, slot)
};

std::unique_ptr<EnergyModel> make_energy_model(const PotentialSpec& potential, const LatticeGraph& graph,
                                               const Region& region, const BoundaryCondition& bc);

}  // namespace ggl
