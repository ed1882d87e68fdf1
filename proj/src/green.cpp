#include "ggl/green.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "ggl/error.hpp"

namespace ggl {

double DiscreteMeasure::mass() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

double DiscreteMeasure::at(const Vertex& x) const {
  const auto i = support.index_of(x);
  return i >= 0 ? weights[static_cast<std::size_t>(i)] : 0.0;
}

GreenOperator::GreenOperator(const LatticeGraph& graph, Region domain, double rel_tol)
    : graph_(graph), domain_(std::move(domain)), op_(graph_, domain_), rel_tol_(rel_tol) {}

std::vector<double> GreenOperator::solve(const std::vector<double>& rhs) const {
  std::vector<double> u(rhs.size(), 0.0);
  solve_killed(op_, rhs, u, rel_tol_);
  return u;
}

std::vector<double> GreenOperator::column(const Vertex& y) const {
  const auto j = domain_.index_of(y);
  if (j < 0) return std::vector<double>(domain_.size(), 0.0);
  std::vector<double> rhs(domain_.size(), 0.0);
  rhs[static_cast<std::size_t>(j)] = 1.0;
  return solve(rhs);
}

double GreenOperator::operator()(const Vertex& x, const Vertex& y) const {
  const auto i = domain_.index_of(x);
  if (i < 0 || !domain_.contains(y)) return 0.0;
  return column(y)[static_cast<std::size_t>(i)];
}

namespace {

std::size_t cube_sites(int dim, int r) {
  std::size_t n = 1;
  for (int i = 0; i < dim; ++i) n *= static_cast<std::size_t>(2 * r + 1);
  return n;
}

/// Richardson extrapolation of f(r) = f∞ + c/(r+1) over a geometric radius
/// sequence; f returns a vector of values at radius r.
template <typename F>
std::pair<std::vector<double>, double> extrapolate(int dim, int r0, const Infinite& opts, std::vector<int>& radii,
                                                   F f) {
  if (!(opts.tol > 0.0) || !(opts.ratio > 1.0)) throw Error(ErrorCode::InvalidArgument, "bad extrapolation options");
  std::vector<double> prev_vals, prev_ext;
  double prev_rho = 0.0;
  int r = r0;
  while (true) {
    if (cube_sites(dim, r) > opts.max_sites) {
      throw Error(ErrorCode::TolInfeasible,
                  "box of radius " + std::to_string(r) + " exceeds the site budget before reaching tol");
    }
    std::vector<double> vals = f(r);
    radii.push_back(r);
    const double rho = r + 1.0;
    if (!prev_vals.empty()) {
      std::vector<double> ext(vals.size());
      for (std::size_t k = 0; k < vals.size(); ++k) {
        ext[k] = (rho * vals[k] - prev_rho * prev_vals[k]) / (rho - prev_rho);
      }
      if (!prev_ext.empty()) {
        double diff = 0.0;
        for (std::size_t k = 0; k < ext.size(); ++k) diff = std::max(diff, std::abs(ext[k] - prev_ext[k]));
        if (diff <= opts.tol / 2.0) return {ext, diff};
      }
      prev_ext = std::move(ext);
    }
    prev_vals = std::move(vals);
    prev_rho = rho;
    int next = static_cast<int>(std::ceil(r * opts.ratio));
    r = std::max(next, r + 1);
  }
}

Vertex bounding_center(const Region& U, int dim, int& half_extent) {
  Vertex lo = U[0], hi = U[0];
  for (const auto& v : U) {
    for (int i = 0; i < dim; ++i) {
      lo[i] = std::min(lo[i], v[i]);
      hi[i] = std::max(hi[i], v[i]);
    }
  }
  Vertex c{};
  half_extent = 0;
  for (int i = 0; i < dim; ++i) {
    c[i] = lo[i] + (hi[i] - lo[i]) / 2;
    half_extent = std::max(half_extent, std::max(hi[i] - c[i], c[i] - lo[i]));
  }
  return c;
}

}  // namespace

GreenRow green_row_infinite(const LatticeGraph& graph, const Vertex& x, const std::vector<Vertex>& targets,
                            const Infinite& opts) {
  if (graph.dim() < 3) throw Error(ErrorCode::InvalidArgument, "infinite-volume Green function needs d >= 3");
  int reach = 0;
  for (const auto& t : targets) reach = std::max(reach, linf_norm(t - x));
  const int r0 = opts.start_radius + reach;
  GreenRow row;
  auto [vals, err] = extrapolate(graph.dim(), r0, opts, row.radii, [&](int r) {
    GreenOperator G(graph, Region::cube(graph.dim(), x, r));
    const std::vector<double> col = G.column(x);
    std::vector<double> out(targets.size());
    for (std::size_t k = 0; k < targets.size(); ++k) {
      out[k] = col[static_cast<std::size_t>(G.domain().index_of(targets[k]))];
    }
    return out;
  });
  row.values = std::move(vals);
  row.error_bound = err;
  return row;
}

GreenValue green(const LatticeGraph& graph, const Domain& domain, const Vertex& x, const Vertex& y) {
  if (const auto* region = std::get_if<Region>(&domain)) {
    GreenOperator G(graph, *region);
    return {G(x, y), 0.0};
  }
  const auto& inf = std::get<Infinite>(domain);
  GreenRow row = green_row_infinite(graph, x, {y}, inf);
  return {row.values[0], row.error_bound};
}

std::vector<double> hitting_potential(const LatticeGraph& graph, const Region& U, const Region& complement,
                                      double rel_tol) {
  KilledWalkOperator A(graph, complement);
  std::vector<double> rhs(complement.size(), 0.0);
  const double w = 1.0 / static_cast<double>(graph.degree());
  for (std::size_t i = 0; i < complement.size(); ++i) {
    for (const auto& g : graph.generators()) {
      if (U.contains(complement[i] + g)) rhs[i] += w;
    }
  }
  std::vector<double> h(complement.size(), 0.0);
  solve_killed(A, rhs, h, rel_tol);
  return h;
}

HittingResult hitting(const LatticeGraph& graph, const Vertex& x, const Region& U, const Region& domain,
                      double rel_tol) {
  if (!domain.contains(x)) throw Error(ErrorCode::InvalidArgument, "hitting: x outside domain");
  if (!U.subset_of(domain)) throw Error(ErrorCode::InvalidArgument, "hitting: U not inside domain");
  HittingResult res;
  res.nu.support = U;
  res.nu.weights.assign(U.size(), 0.0);
  if (U.contains(x)) {
    res.nu.weights[static_cast<std::size_t>(U.index_of(x))] = 1.0;
    res.p = 1.0;
    return res;
  }
  const Region C = domain.minus(U);
  GreenOperator G(graph, C, rel_tol);
  const std::vector<double> g = G.column(x);
  const double w = 1.0 / static_cast<double>(graph.degree());
  for (std::size_t i = 0; i < C.size(); ++i) {
    if (g[i] == 0.0) continue;
    for (const auto& step : graph.generators()) {
      const auto j = U.index_of(C[i] + step);
      if (j >= 0) res.nu.weights[static_cast<std::size_t>(j)] += g[i] * w;
    }
  }
  res.p = res.nu.mass();
  return res;
}

int margin(const LatticeGraph& graph, const Region& U, const Region& domain) {
  std::unordered_set<Vertex, VertexHash> seen(U.begin(), U.end());
  std::vector<Vertex> frontier(U.begin(), U.end());
  for (const auto& u : U) {
    if (!domain.contains(u)) return -1;
  }
  for (int layer = 0;; ++layer) {
    std::vector<Vertex> next;
    for (const auto& v : frontier) {
      for (const auto& g : graph.generators()) {
        const Vertex y = v + g;
        if (!seen.insert(y).second) continue;
        if (!domain.contains(y)) return layer;
        next.push_back(y);
      }
    }
    if (next.empty()) return std::numeric_limits<int>::max();
    frontier = std::move(next);
  }
}

int graph_diameter(const LatticeGraph& graph, const Region& U) {
  int best = 0;
  for (std::size_t i = 0; i < U.size(); ++i) {
    for (std::size_t j = i + 1; j < U.size(); ++j) {
      const int l1 = l1_norm(U[i] - U[j]);
      if (graph.is_nearest_neighbor()) {
        best = std::max(best, l1);
        continue;
      }
      const auto d = graph_distance(graph, U[i], U[j], 4 * l1 + 4);
      if (!d) throw Error(ErrorCode::InvalidArgument, "graph_diameter: distance exceeds search limit");
      best = std::max(best, *d);
    }
  }
  return best;
}

EquilibriumResult equilibrium_and_capacity(const LatticeGraph& graph, const Region& U, const Region& approx_domain) {
  if (U.empty()) throw Error(ErrorCode::InvalidArgument, "equilibrium of the empty set");
  const int m = margin(graph, U, approx_domain);
  const int diam = graph_diameter(graph, U);
  if (m < diam) {
    throw Error(ErrorCode::MarginTooSmall,
                "margin " + std::to_string(m) + " below diam(U) = " + std::to_string(diam));
  }
  const Region C = approx_domain.minus(U);
  const std::vector<double> h = hitting_potential(graph, U, C);
  EquilibriumResult res;
  res.e.support = U;
  res.e.weights.assign(U.size(), 0.0);
  const double w = 1.0 / static_cast<double>(graph.degree());
  for (std::size_t i = 0; i < U.size(); ++i) {
    double esc = 0.0;
    for (const auto& g : graph.generators()) {
      const Vertex z = U[i] + g;
      if (U.contains(z)) continue;
      const auto j = C.index_of(z);
      esc += w * (1.0 - (j >= 0 ? h[static_cast<std::size_t>(j)] : 0.0));
    }
    res.e.weights[i] = esc;
  }
  res.cap = res.e.mass();

  // Energy of the normalized measure under g_D.
  GreenOperator G(graph, approx_domain);
  double energy = 0.0;
  for (std::size_t j = 0; j < U.size(); ++j) {
    const std::vector<double> col = G.column(U[j]);
    for (std::size_t i = 0; i < U.size(); ++i) {
      energy += res.e.weights[i] * col[static_cast<std::size_t>(approx_domain.index_of(U[i]))] * res.e.weights[j];
    }
  }
  energy /= res.cap * res.cap;
  res.identity_residual = std::abs(res.cap * energy - 1.0);
  return res;
}

CapacityValue capacity_infinite(const LatticeGraph& graph, const Region& U, const Infinite& opts) {
  if (graph.dim() < 3) throw Error(ErrorCode::InvalidArgument, "infinite-volume capacity needs d >= 3");
  int half = 0;
  const Vertex c = bounding_center(U, graph.dim(), half);
  std::vector<int> radii;
  auto [vals, err] = extrapolate(graph.dim(), opts.start_radius + half, opts, radii, [&](int r) {
    const Region box = Region::cube(graph.dim(), c, r);
    const Region C = box.minus(U);
    const std::vector<double> h = hitting_potential(graph, U, C);
    const double w = 1.0 / static_cast<double>(graph.degree());
    double cap = 0.0;
    for (const auto& u : U) {
      for (const auto& g : graph.generators()) {
        const Vertex z = u + g;
        if (U.contains(z)) continue;
        const auto j = C.index_of(z);
        cap += w * (1.0 - (j >= 0 ? h[static_cast<std::size_t>(j)] : 0.0));
      }
    }
    return std::vector<double>{cap};
  });
  return {vals[0], err};
}

double sigma_ratio(const LatticeGraph& graph, const Vertex& x, const Region& U, const Infinite& opts) {
  if (U.contains(x)) throw Error(ErrorCode::InvalidArgument, "sigma_ratio: x lies in U");
  if (U.empty()) throw Error(ErrorCode::InvalidArgument, "sigma_ratio: empty U");
  if (U.size() == 1) return 1.0;
  const GreenRow row = green_row_infinite(graph, x, U.vertices(), opts);
  const auto [mn, mx] = std::minmax_element(row.values.begin(), row.values.end());
  return *mx / *mn;
}

double sigma_ratio(const LatticeGraph& graph, const Region& S, const Region& U, const Infinite& opts) {
  if (!S.disjoint_from(U)) throw Error(ErrorCode::InvalidArgument, "sigma_ratio: S meets U");
  double best = 1.0;
  for (const auto& x : S) best = std::max(best, sigma_ratio(graph, x, U, opts));
  return best;
}

}  // namespace ggl
