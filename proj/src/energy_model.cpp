#include "ggl/energy_model.hpp"

#include <algorithm>
#include <cmath>

#include "ggl/error.hpp"

namespace ggl {

NeighborTable NeighborTable::build(const LatticeGraph& graph, const Region& region, const BoundaryCondition& bc) {
  NeighborTable t;
  t.degree = graph.degree();
  t.index.resize(region.size() * t.degree);
  t.bc.assign(region.size() * t.degree, 0.0);
  for (std::size_t i = 0; i < region.size(); ++i) {
    for (std::size_t k = 0; k < t.degree; ++k) {
      const Vertex y = region[i] + graph.generators()[k];
      const auto j = region.index_of(y);
      t.index[i * t.degree + k] = static_cast<std::int32_t>(j);
      if (j < 0) t.bc[i * t.degree + k] = bc.value(y);
    }
  }
  return t;
}

// ---------------------------------------------------------------------------

TwoBodyModel::TwoBodyModel(PotentialSpec potential, const LatticeGraph& graph, Region region,
                           const BoundaryCondition& bc)
    : EnergyModel(std::move(region)), potential_(std::move(potential)), graph_(graph) {
  if (!potential_.two_body()) throw Error(ErrorCode::InvalidArgument, "TwoBodyModel needs a two-body potential");
  table_ = NeighborTable::build(graph_, region_, bc);
}

double TwoBodyModel::energy(const std::vector<double>& phi) const {
  const std::size_t deg = table_.degree;
  double e = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t k = 0; k < deg; ++k) {
      const double w = table_.index[i * deg + k] >= 0 ? 0.5 : 1.0;
      e += w * potential_.v(table_.value(i, k, phi) - phi[i]);
    }
  }
  return e;
}

double TwoBodyModel::energy_and_gradient(const std::vector<double>& phi, std::vector<double>& grad) const {
  const std::size_t deg = table_.degree;
  grad.assign(size(), 0.0);
  double e = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    double g = 0.0;
    for (std::size_t k = 0; k < deg; ++k) {
      const double eta = table_.value(i, k, phi) - phi[i];
      const double w = table_.index[i * deg + k] >= 0 ? 0.5 : 1.0;
      e += w * potential_.v(eta);
      g -= potential_.dv(eta);
    }
    grad[i] = g;
  }
  return e;
}

void TwoBodyModel::gradient(const std::vector<double>& phi, std::vector<double>& grad) const {
  const std::size_t deg = table_.degree;
  grad.resize(size());
  for (std::size_t i = 0; i < size(); ++i) {
    double g = 0.0;
    for (std::size_t k = 0; k < deg; ++k) g -= potential_.dv(table_.value(i, k, phi) - phi[i]);
    grad[i] = g;
  }
}

double TwoBodyModel::local_value(std::size_t i, double t, const std::vector<double>& phi) const {
  double e = 0.0;
  for (std::size_t k = 0; k < table_.degree; ++k) e += potential_.v(table_.value(i, k, phi) - t);
  return e;
}

LocalEnergy TwoBodyModel::local(std::size_t i, double t, const std::vector<double>& phi) const {
  LocalEnergy le;
  for (std::size_t k = 0; k < table_.degree; ++k) {
    const double eta = table_.value(i, k, phi) - t;
    le.e += potential_.v(eta);
    le.de -= potential_.dv(eta);
    le.d2e += potential_.d2v(eta);
  }
  return le;
}

std::optional<double> TwoBodyModel::curvature_lower(std::size_t) const {
  if (!potential_.convex) return std::nullopt;
  return static_cast<double>(table_.degree) * potential_.d2v_lo;
}

double TwoBodyModel::curvature_upper(std::size_t) const {
  return static_cast<double>(table_.degree) * potential_.d2v_hi;
}

double TwoBodyModel::edge_conductance(std::size_t i, std::size_t k, const std::vector<double>& phi) const {
  return potential_.d2v(table_.value(i, k, phi) - phi[i]);
}

// ---------------------------------------------------------------------------

EvenModel::EvenModel(PotentialSpec effective, Region even_region, const BoundaryCondition& bc)
    : EnergyModel(std::move(even_region)), potential_(std::move(effective)) {
  if (potential_.kind != PotentialKind::EffectiveEven || !potential_.effective) {
    throw Error(ErrorCode::InvalidArgument, "EvenModel needs an effective even potential");
  }
  ev_ = potential_.effective.get();
  const int d = ev_->dim();
  arity_ = static_cast<std::size_t>(ev_->arity());
  for (const auto& x : region_) {
    if (!is_even(x)) throw Error(ErrorCode::InvalidArgument, "EvenModel region has odd vertex " + format_vertex(x, d));
    for (int i = 0; i < d; ++i) {
      for (int s : {1, -1}) odd_sites_.push_back(x + unit_vector(i, s));
    }
  }
  std::sort(odd_sites_.begin(), odd_sites_.end());
  odd_sites_.erase(std::unique(odd_sites_.begin(), odd_sites_.end()), odd_sites_.end());

  factor_sites_.resize(odd_sites_.size() * arity_);
  factor_bc_.assign(odd_sites_.size() * arity_, 0.0);
  site_factors_.resize(region_.size());
  for (std::size_t f = 0; f < odd_sites_.size(); ++f) {
    for (std::size_t s = 0; s < arity_; ++s) {
      const Vertex w = odd_sites_[f] + unit_vector(static_cast<int>(s / 2), s % 2 == 0 ? 1 : -1);
      const auto j = region_.index_of(w);
      factor_sites_[f * arity_ + s] = static_cast<std::int32_t>(j);
      if (j < 0) {
        factor_bc_[f * arity_ + s] = bc.value(w);
      } else {
        site_factors_[static_cast<std::size_t>(j)].emplace_back(f, s);
      }
    }
  }
}

void EvenModel::gather(std::size_t f, const std::vector<double>& phi, double* eta) const {
  for (std::size_t s = 0; s < arity_; ++s) {
    const std::int32_t j = factor_sites_[f * arity_ + s];
    eta[s] = j >= 0 ? phi[static_cast<std::size_t>(j)] : factor_bc_[f * arity_ + s];
  }
}

double EvenModel::energy(const std::vector<double>& phi) const {
  std::vector<double> eta(arity_);
  double e = 0.0;
  for (std::size_t f = 0; f < factor_count(); ++f) {
    gather(f, phi, eta.data());
    e += ev_->value(eta.data());
  }
  return e;
}

double EvenModel::energy_and_gradient(const std::vector<double>& phi, std::vector<double>& grad) const {
  std::vector<double> eta(arity_), g(arity_);
  grad.assign(size(), 0.0);
  double e = 0.0;
  for (std::size_t f = 0; f < factor_count(); ++f) {
    gather(f, phi, eta.data());
    e += ev_->evaluate(eta.data(), g.data());
    for (std::size_t s = 0; s < arity_; ++s) {
      const std::int32_t j = factor_sites_[f * arity_ + s];
      if (j >= 0) grad[static_cast<std::size_t>(j)] += g[s];
    }
  }
  return e;
}

LocalEnergy EvenModel::local(std::size_t i, double t, const std::vector<double>& phi) const {
  std::vector<double> eta(arity_), g(arity_), h(arity_ * arity_);
  LocalEnergy le;
  for (const auto& [f, s] : site_factors_[i]) {
    gather(f, phi, eta.data());
    eta[s] = t;
    le.e += ev_->evaluate(eta.data(), g.data(), h.data());
    le.de += g[s];
    le.d2e += h[s * arity_ + s];
  }
  return le;
}

std::optional<double> EvenModel::curvature_lower(std::size_t i) const {
  const auto c = ev_->diagonal_curvature();
  if (!c) return std::nullopt;
  return static_cast<double>(site_factors_[i].size()) * *c;
}

double EvenModel::curvature_upper(std::size_t i) const {
  if (const auto c = ev_->diagonal_curvature()) return static_cast<double>(site_factors_[i].size()) * *c;
  return static_cast<double>(site_factors_[i].size()) * ev_->beta() * ev_->base().d2v_hi;
}

std::size_t EvenModel::max_degree() const {
  const std::size_t d = arity_ / 2;
  return 2 * d * d;
}

std::vector<std::tuple<int, int, double>> EvenModel::quadratic_hessian() const {
  if (!ev_->diagonal_curvature()) throw Error(ErrorCode::MethodUnsupported, "quadratic_hessian needs a quadratic base");
  const double bk = ev_->beta() * ev_->base().stiffness;
  const double n = static_cast<double>(arity_);
  std::vector<std::tuple<int, int, double>> out;
  for (std::size_t f = 0; f < factor_count(); ++f) {
    for (std::size_t s = 0; s < arity_; ++s) {
      const int a = factor_sites_[f * arity_ + s];
      if (a < 0) continue;
      for (std::size_t t = 0; t < arity_; ++t) {
        const int b = factor_sites_[f * arity_ + t];
        if (b < 0) continue;
        out.emplace_back(a, b, bk * ((s == t ? 1.0 : 0.0) - 1.0 / n));
      }
    }
  }
  return out;
}

std::vector<double> EvenModel::quadratic_linear_term() const {
  if (!ev_->diagonal_curvature()) throw Error(ErrorCode::MethodUnsupported, "quadratic_linear_term needs a quadratic base");
  const double bk = ev_->beta() * ev_->base().stiffness;
  const double n = static_cast<double>(arity_);
  std::vector<double> b(size(), 0.0);
  for (std::size_t f = 0; f < factor_count(); ++f) {
    for (std::size_t s = 0; s < arity_; ++s) {
      const int a = factor_sites_[f * arity_ + s];
      if (a < 0) continue;
      for (std::size_t t = 0; t < arity_; ++t) {
        if (factor_sites_[f * arity_ + t] >= 0) continue;
        b[static_cast<std::size_t>(a)] -= bk * ((s == t ? 1.0 : 0.0) - 1.0 / n) * factor_bc_[f * arity_ + t];
      }
    }
  }
  return b;
}

std::unique_ptr<EnergyModel> make_energy_model(const PotentialSpec& potential, const LatticeGraph& graph,
                                               const Region& region, const BoundaryCondition& bc) {
  if (potential.two_body()) return std::make_unique<TwoBodyModel>(potential, graph, region, bc);
  if (graph.dim() != potential.effective->dim()) {
    throw Error(ErrorCode::InvalidArgument, "graph dimension does not match the effective potential");
  }
  return std::make_unique<EvenModel>(potential, region, bc);
}

}  // namespace ggl
