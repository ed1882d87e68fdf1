#include "ggl/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <string>
#include <limits>

#include "ggl/error.hpp"
#include "ggl/rng.hpp"
#include "ggl/stats.hpp"
#include "ggl/union_find.hpp"

namespace ggl {

std::size_t ClusterLabeling::largest() const {
  return sizes.empty() ? 0 : *std::max_element(sizes.begin(), sizes.end());
}

ClusterLabeling clusters(const LatticeGraph& graph, const Region& region, const std::vector<std::uint8_t>& occupied) {
  if (occupied.size() != region.size()) throw Error(ErrorCode::InvalidArgument, "occupation size mismatch");
  const std::size_t n = region.size();
  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!occupied[i]) continue;
    for (const auto& g : graph.generators()) {
      const auto j = region.index_of(region[i] + g);
      if (j > static_cast<std::ptrdiff_t>(i) && occupied[static_cast<std::size_t>(j)]) {
        uf.unite(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
      }
    }
  }
  ClusterLabeling out;
  out.region = region;
  out.occupied = occupied;
  out.steps = graph.generators();
  out.label.assign(n, -1);
  std::vector<std::int32_t> root_label(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (!occupied[i]) continue;
    const auto r = uf.find(static_cast<std::uint32_t>(i));
    if (root_label[r] < 0) {
      root_label[r] = static_cast<std::int32_t>(out.sizes.size());
      out.sizes.push_back(0);
    }
    out.label[i] = root_label[r];
    ++out.sizes[static_cast<std::size_t>(root_label[r])];
  }
  return out;
}

ClusterLabeling clusters(const LatticeGraph& graph, const FieldConfig& field, double h) {
  std::vector<std::uint8_t> occ(field.region.size());
  for (std::size_t i = 0; i < occ.size(); ++i) occ[i] = field.heights[i] >= h;
  return clusters(graph, field.region, occ);
}

std::optional<int> chemical_distance(const ClusterLabeling& labels, const Vertex& x, const Vertex& y) {
  const auto ix = labels.region.index_of(x), iy = labels.region.index_of(y);
  if (ix < 0 || iy < 0) return std::nullopt;
  const auto lx = labels.label[static_cast<std::size_t>(ix)], ly = labels.label[static_cast<std::size_t>(iy)];
  if (lx < 0 || ly < 0 || lx != ly) return std::nullopt;
  std::vector<int> dist(labels.region.size(), -1);
  std::deque<std::size_t> queue{static_cast<std::size_t>(ix)};
  dist[static_cast<std::size_t>(ix)] = 0;
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    if (v == static_cast<std::size_t>(iy)) return dist[v];
    for (const auto& g : labels.steps) {
      const auto w = labels.region.index_of(labels.region[v] + g);
      if (w < 0 || !labels.occupied[static_cast<std::size_t>(w)] || dist[static_cast<std::size_t>(w)] >= 0) continue;
      dist[static_cast<std::size_t>(w)] = dist[v] + 1;
      queue.push_back(static_cast<std::size_t>(w));
    }
  }
  return std::nullopt;
}

namespace {

std::vector<LevelEstimate> level_estimates(const std::vector<double>& levels, const std::vector<double>& hs,
                                           bool independent) {
  std::vector<LevelEstimate> out;
  std::vector<double> ind(levels.size());
  for (double h : hs) {
    for (std::size_t i = 0; i < levels.size(); ++i) ind[i] = levels[i] >= h ? 1.0 : 0.0;
    const MeanSe m = estimate_mean(ind, independent);
    out.push_back({h, m.mean, m.se});
  }
  return out;
}

}  // namespace

std::vector<LevelEstimate> connectivity(const FieldSource& source, const LatticeGraph& graph, const Vertex& x,
                                        const Vertex& y, const std::vector<double>& hs, std::size_t n,
                                        std::uint64_t seed) {
  if (!source.sites.contains(x) || !source.sites.contains(y)) {
    throw Error(ErrorCode::InvalidArgument, "x and y must lie in the sampled region");
  }
  const int dim = source.sites.dim();
  const CompiledEvent ev(MonotoneEvent::crossing(graph, Region(dim, {x}), Region(dim, {y}), source.sites),
                         source.sites);
  const SampleStream s = source.draw(n, seed);
  std::vector<double> levels(n);
  for (std::size_t i = 0; i < n; ++i) levels[i] = ev.critical_level(s.row(i));
  return level_estimates(levels, hs, source.independent);
}

LevelEstimate connectivity(const FieldSource& source, const LatticeGraph& graph, const Vertex& x, const Vertex& y,
                           double h, std::size_t n, std::uint64_t seed) {
  return connectivity(source, graph, x, y, std::vector<double>{h}, n, seed).front();
}

std::vector<double> crossing_levels(const SampleStream& stream, const LatticeGraph& graph, const Vertex& y, int L) {
  const MonotoneEvent ev = MonotoneEvent::ball_crossing(graph, y, L);
  if (!ev.support().subset_of(stream.region)) {
    throw Error(ErrorCode::InvalidArgument, "B(y, 2L) and its boundary must lie in the sampled region");
  }
  const CompiledEvent c(ev, stream.region);
  std::vector<double> levels(stream.n);
  for (std::size_t i = 0; i < stream.n; ++i) levels[i] = c.critical_level(stream.row(i));
  return levels;
}

std::vector<LevelEstimate> crossing_probability(const FieldSource& source, const LatticeGraph& graph,
                                                const Vertex& y, int L, const std::vector<double>& hs,
                                                std::size_t n, std::uint64_t seed) {
  if (!MonotoneEvent::ball_crossing(graph, y, L).support().subset_of(source.sites)) {
    throw Error(ErrorCode::InvalidArgument, "B(y, 2L) and its boundary must lie in the sampled region");
  }
  const SampleStream s = source.draw(n, seed);
  return level_estimates(crossing_levels(s, graph, y, L), hs, source.independent);
}

LevelEstimate crossing_probability(const FieldSource& source, const LatticeGraph& graph, const Vertex& y, int L,
                                   double h, std::size_t n, std::uint64_t seed) {
  return crossing_probability(source, graph, y, L, std::vector<double>{h}, n, seed).front();
}

// ---------------------------------------------------------------------------

long long Scales::L(int k) const {
  long long v = base;
  for (int i = 0; i < k; ++i) {
    if (v > std::numeric_limits<long long>::max() / R) throw Error(ErrorCode::InvalidArgument, "length scale overflow");
    v *= R;
  }
  return v;
}

void Scales::validate() const {
  if (strict) {
    if (base != 100 || R < 100 * 100) throw Error(ErrorCode::InvalidArgument, "strict scales need base 100 and R >= 100^2");
  } else if (base < 1 || R < 2 || static_cast<long long>(R) < static_cast<long long>(base) * base) {
    throw Error(ErrorCode::InvalidArgument, "desk scales need base >= 1 and R >= max(2, base^2)");
  }
}

int ProperEmbedding::level_of(std::size_t node) {
  int k = 0;
  while (node >= (std::size_t{2} << k) - 1) ++k;
  return k;
}

long long ProperEmbedding::ball_radius(std::size_t node) const { return 10 * scales.L(depth - level_of(node)); }

std::vector<std::size_t> ProperEmbedding::leaves() const {
  std::vector<std::size_t> out;
  const std::size_t first = (std::size_t{1} << depth) - 1;
  for (std::size_t i = first; i < tau.size(); ++i) out.push_back(i);
  return out;
}

namespace {

long long l1_dist(const Vertex& a, const Vertex& b) {
  long long s = 0;
  for (int i = 0; i < kMaxDim; ++i) s += std::llabs(static_cast<long long>(a[i]) - b[i]);
  return s;
}

long long ceil_div(long long a, long long b) { return (a + b - 1) / b; }

}  // namespace

std::optional<std::string> validate_embedding(const ProperEmbedding& e) {
  const int n = e.depth;
  if (n < 0) return "negative depth";
  const std::size_t nodes = (std::size_t{2} << n) - 1;
  if (e.tau.size() != nodes) return "tree has " + std::to_string(e.tau.size()) + " nodes, expected " + std::to_string(nodes);
  if (e.tau[0] != e.x0) return "root is not the base point";
  for (std::size_t m = 0; m < nodes; ++m) {
    int k = 0;
    for (std::size_t first = 1; m + 1 >= 2 * first; first *= 2) ++k;
    const long long Lk = e.scales.L(n - k);
    for (int i = 0; i < kMaxDim; ++i) {
      if (i >= e.dim && e.tau[m][i] != 0) return "node " + std::to_string(m) + " leaves the lattice dimension";
      if (e.tau[m][i] % Lk != 0) return "node " + std::to_string(m) + " not on L_" + std::to_string(n - k) + " Z^d";
    }
    if (k == n) continue;
    const long long r_parent = 10 * Lk;
    const long long Lchild = e.scales.L(n - k - 1);
    const long long r_child = 10 * Lchild;
    const std::size_t c0 = 2 * m + 1, c1 = 2 * m + 2;
    for (std::size_t c : {c0, c1}) {
      if (l1_dist(e.tau[c], e.tau[m]) + r_child > r_parent) {
        return "ball of node " + std::to_string(c) + " not inside its parent's";
      }
    }
    const long long gap = std::max(0LL, l1_dist(e.tau[c0], e.tau[c1]) - 2 * r_child);
    if (gap * e.scales.divisor() < Lk) return "children of node " + std::to_string(m) + " too close";
    if (e.variant == EmbeddingVariant::XiStar && k >= 1) {
      if (l1_dist(e.tau[c0], e.tau[m]) > Lchild + Lk) return "node " + std::to_string(c0) + " misses B(τ(m), L)";
      if (l1_dist(e.tau[c1], e.tau[m]) > Lchild + (3 * Lk) / 2) {
        return "node " + std::to_string(c1) + " misses B(τ(m), 3L/2)";
      }
    }
  }
  return std::nullopt;
}

namespace {

struct ChildSpec {
  long long step;    // child lattice spacing
  long long q0, q1;  // max |u|_1 for child 0, 1 (in units of step)
  long long need;    // required |c0 - c1|_1
};

ChildSpec child_spec(const Scales& sc, int n, int k, EmbeddingVariant variant) {
  const long long Lk = sc.L(n - k), Lc = sc.L(n - k - 1);
  ChildSpec s;
  s.step = Lc;
  s.q0 = s.q1 = (10 * Lk - 10 * Lc) / Lc;
  if (variant == EmbeddingVariant::XiStar && k >= 1) {
    s.q0 = std::min(s.q0, (Lc + Lk) / Lc);
    s.q1 = std::min(s.q1, (Lc + (3 * Lk) / 2) / Lc);
  }
  s.need = 20 * Lc + ceil_div(Lk, sc.divisor());
  return s;
}

std::vector<Vertex> lattice_ball(const Vertex& c, long long step, long long q, int dim) {
  std::vector<Vertex> out;
  std::vector<long long> u(static_cast<std::size_t>(dim), -q);
  while (true) {
    long long s = 0;
    for (auto v : u) s += std::llabs(v);
    if (s <= q) {
      Vertex v = c;
      for (int i = 0; i < dim; ++i) v[i] += static_cast<std::int32_t>(u[static_cast<std::size_t>(i)] * step);
      out.push_back(v);
    }
    int i = 0;
    while (i < dim && u[static_cast<std::size_t>(i)] == q) u[static_cast<std::size_t>(i++)] = -q;
    if (i == dim) break;
    ++u[static_cast<std::size_t>(i)];
  }
  return out;
}

void check_common(const Vertex& x0, int n, const Scales& scales, const LatticeGraph& graph) {
  scales.validate();
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "depth must be >= 0");
  if (!graph.is_nearest_neighbor()) throw Error(ErrorCode::InvalidArgument, "embeddings use the nearest-neighbour graph");
  const long long Ln = scales.L(n);
  for (int i = 0; i < graph.dim(); ++i) {
    if (x0[i] % Ln != 0) throw Error(ErrorCode::NoEmbeddingExists, "base point not on L_n Z^d");
  }
}

// Lattice points u in Z^d with |u|_1 <= q: sum_j 2^j C(d,j) C(q,j).
double l1_ball_count(long long q, int dim) {
  double total = 0.0, cd = 1.0, cq = 1.0, pow2 = 1.0;
  for (int j = 0; j <= dim && j <= q; ++j) {
    total += pow2 * cd * cq;
    cd = cd * (dim - j) / (j + 1);
    cq = cq * static_cast<double>(q - j) / (j + 1);
    pow2 *= 2.0;
  }
  return total;
}

// Two children are at most (q0 + q1) steps apart, reached in opposite directions.
bool feasible(const ChildSpec& s) { return s.step * (s.q0 + s.q1) >= s.need; }

}  // namespace

std::vector<ProperEmbedding> proper_embeddings(const Vertex& x0, int n, const Scales& scales,
                                               const LatticeGraph& graph, EmbeddingVariant variant,
                                               const EnumerateMode& mode) {
  check_common(x0, n, scales, graph);
  const int dim = graph.dim();
  for (int k = 0; k < n; ++k) {
    if (!feasible(child_spec(scales, n, k, variant))) throw Error(ErrorCode::NoEmbeddingExists, "children cannot be separated");
  }
  ProperEmbedding proto;
  proto.x0 = x0;
  proto.depth = n;
  proto.dim = dim;
  proto.scales = scales;
  proto.variant = variant;
  proto.tau.assign((std::size_t{2} << n) - 1, Vertex{});
  proto.tau[0] = x0;

  std::vector<ProperEmbedding> out;
  const std::size_t nodes = proto.tau.size();
  const std::size_t internal = nodes / 2;
  // Depth-first over internal nodes in heap order; node m's children are
  // placed once τ(m) is known.
  std::function<void(std::size_t)> place = [&](std::size_t m) {
    if (m == internal) {
      if (out.size() >= mode.budget) throw Error(ErrorCode::BudgetExceeded, "more than " + std::to_string(mode.budget) + " embeddings");
      out.push_back(proto);
      return;
    }
    const int k = ProperEmbedding::level_of(m);
    const ChildSpec s = child_spec(scales, n, k, variant);
    // Refuse before materializing the balls when the pair scan alone is too long.
    if (l1_ball_count(s.q0, dim) * l1_ball_count(s.q1, dim) > 1000.0 * static_cast<double>(mode.budget)) {
      throw Error(ErrorCode::BudgetExceeded, "candidate pairs exceed 1000 x budget " + std::to_string(mode.budget));
    }
    const auto a = lattice_ball(proto.tau[m], s.step, s.q0, dim);
    const auto b = lattice_ball(proto.tau[m], s.step, s.q1, dim);
    for (const auto& c0 : a) {
      for (const auto& c1 : b) {
        if (l1_dist(c0, c1) < s.need) continue;
        proto.tau[2 * m + 1] = c0;
        proto.tau[2 * m + 2] = c1;
        place(m + 1);
      }
    }
  };
  place(0);
  return out;
}

std::vector<ProperEmbedding> proper_embeddings(const Vertex& x0, int n, const Scales& scales,
                                               const LatticeGraph& graph, EmbeddingVariant variant,
                                               const SampleMode& mode) {
  check_common(x0, n, scales, graph);
  const int dim = graph.dim();
  for (int k = 0; k < n; ++k) {
    if (!feasible(child_spec(scales, n, k, variant))) throw Error(ErrorCode::NoEmbeddingExists, "children cannot be separated");
  }
  Rng rng(mode.seed, 0);
  auto draw = [&](const Vertex& c, long long step, long long q) {
    // Uniform lattice point of the ℓ1 ball by rejection from the cube.
    while (true) {
      Vertex v = c;
      long long s = 0;
      for (int i = 0; i < dim; ++i) {
        const long long u = static_cast<long long>(rng.below(static_cast<std::uint64_t>(2 * q + 1))) - q;
        s += std::llabs(u);
        v[i] += static_cast<std::int32_t>(u * step);
      }
      if (s <= q) return v;
    }
  };
  std::vector<ProperEmbedding> out;
  for (std::size_t e = 0; e < mode.k; ++e) {
    ProperEmbedding emb;
    emb.x0 = x0;
    emb.depth = n;
    emb.dim = dim;
    emb.scales = scales;
    emb.variant = variant;
    emb.tau.assign((std::size_t{2} << n) - 1, Vertex{});
    emb.tau[0] = x0;
    for (std::size_t m = 0; m < emb.tau.size() / 2; ++m) {
      const ChildSpec s = child_spec(scales, n, ProperEmbedding::level_of(m), variant);
      bool placed = false;
      for (int attempt = 0; attempt < 10000 && !placed; ++attempt) {
        const Vertex c0 = draw(emb.tau[m], s.step, s.q0);
        const Vertex c1 = draw(emb.tau[m], s.step, s.q1);
        if (l1_dist(c0, c1) >= s.need) {
          emb.tau[2 * m + 1] = c0;
          emb.tau[2 * m + 2] = c1;
          placed = true;
        }
      }
      if (!placed) {
        // Antipodal placement along a random axis always meets the separation.
        const int axis = static_cast<int>(rng.below(static_cast<std::uint64_t>(dim)));
        Vertex c0 = emb.tau[m], c1 = emb.tau[m];
        c0[axis] -= static_cast<std::int32_t>(s.q0 * s.step);
        c1[axis] += static_cast<std::int32_t>(s.q1 * s.step);
        emb.tau[2 * m + 1] = c0;
        emb.tau[2 * m + 2] = c1;
      }
    }
    out.push_back(std::move(emb));
  }
  return out;
}

double renorm_eps(const ConstantsConfig& c, int n, double R) {
  return c.c14 * std::sqrt(std::pow(2.0, 2 * n) / std::pow(R, n + 1));
}

double renorm_delta(const ConstantsConfig& c, int n, double R) { return std::exp(-c.c15 * std::pow(std::sqrt(R), n + 1)); }

RenormReport renorm_step_check(const FieldSource& source, const ProperEmbedding& tau,
                               const std::vector<MonotoneEvent>& leaf_events, double h, double eps,
                               std::size_t n_samples, const ConstantsConfig& constants, std::uint64_t seed) {
  if (auto bad = validate_embedding(tau)) throw Error(ErrorCode::InvalidArgument, "embedding invalid: " + *bad);
  const SampleStream s = source.draw(n_samples, seed);
  return renorm_step_check(s, source.independent, tau, leaf_events, h, eps, constants);
}

RenormReport renorm_step_check(const SampleStream& s, bool independent, const ProperEmbedding& tau,
                               const std::vector<MonotoneEvent>& leaf_events, double h, double eps,
                               const ConstantsConfig& constants) {
  constants.validate();
  if (auto bad = validate_embedding(tau)) throw Error(ErrorCode::InvalidArgument, "embedding invalid: " + *bad);
  if (tau.depth < 1) throw Error(ErrorCode::InvalidArgument, "one-step check needs depth >= 1");
  const auto leaves = tau.leaves();
  if (leaf_events.size() != leaves.size()) throw Error(ErrorCode::InvalidArgument, "one event per leaf");
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    const Vertex& c = tau.tau[leaves[i]];
    const long long r = tau.ball_radius(leaves[i]);
    for (const auto& v : leaf_events[i].support()) {
      if (l1_dist(v, c) > r) throw Error(ErrorCode::NotAdapted, "leaf event " + std::to_string(i) + " escapes its ball");
    }
  }
  RenormReport rep;
  rep.n = tau.depth - 1;
  rep.h = h;
  rep.eps = eps;
  rep.eps_n = renorm_eps(constants, rep.n, tau.scales.R);
  rep.delta_n = renorm_delta(constants, rep.n, tau.scales.R);
  if (eps < rep.eps_n) throw Error(ErrorCode::InvalidArgument, "ε below ε_n");

  std::vector<CompiledEvent> compiled;
  for (const auto& e : leaf_events) compiled.emplace_back(e, s.region);
  const std::size_t n_samples = s.n;
  const std::size_t half = leaves.size() / 2;
  std::vector<double> all(n_samples), left(n_samples), right(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const auto row = s.row(i);
    double lo_left = std::numeric_limits<double>::infinity(), lo_right = lo_left;
    for (std::size_t j = 0; j < leaves.size(); ++j) {
      const double lv = compiled[j].critical_level(row);
      (j < half ? lo_left : lo_right) = std::min(j < half ? lo_left : lo_right, lv);
    }
    all[i] = std::min(lo_left, lo_right) >= h ? 1.0 : 0.0;
    left[i] = lo_left >= h - eps ? 1.0 : 0.0;
    right[i] = lo_right >= h - eps ? 1.0 : 0.0;
  }
  auto est = [&](const std::vector<double>& v) {
    const MeanSe m = estimate_mean(v, independent);
    return Estimated{m.mean, m.se};
  };
  rep.lhs = est(all);
  rep.left = est(left);
  rep.right = est(right);
  rep.product = rep.left.value * rep.right.value;
  rep.product_se = std::hypot(rep.right.value * rep.left.se, rep.left.value * rep.right.se);
  rep.pass = rep.lhs.value <= rep.product + rep.delta_n + 3.0 * std::hypot(rep.lhs.se, rep.product_se);
  return rep;
}

DecayFit fit_stretched_exponential(const std::vector<double>& Ls, const std::vector<double>& ps) {
  DecayFit best;
  std::vector<double> L, y;
  for (std::size_t i = 0; i < Ls.size() && i < ps.size(); ++i) {
    if (ps[i] > 0.0) {
      L.push_back(Ls[i]);
      y.push_back(std::log(ps[i]));
    }
  }
  best.points = L.size();
  if (L.size() < 3) return best;
  for (int r = 1; r <= 20; ++r) {
    const double rho = 0.05 * r;
    std::vector<double> X;
    for (double l : L) {
      X.push_back(1.0);
      X.push_back(-std::pow(l, rho));
    }
    const LinearFit fit = least_squares(X, y, 2);
    if (!best.valid || fit.rss < best.rss) {
      best.valid = true;
      best.log_c = fit.coef[0];
      best.c_prime = fit.coef[1];
      best.rho = rho;
      best.rss = fit.rss;
    }
  }
  return best;
}

ScanReport h_plus_scan(const FieldSource& source, const LatticeGraph& graph, const Vertex& center,
                       const std::vector<double>& hs, const std::vector<int>& Ls, std::size_t n, std::uint64_t seed) {
  if (hs.empty() || Ls.empty()) throw Error(ErrorCode::InvalidArgument, "scan grids must be nonempty");
  ScanReport rep;
  rep.hs = hs;
  rep.Ls = Ls;
  const SampleStream s = source.draw(n, seed);
  std::vector<std::vector<LevelEstimate>> byL;
  for (int L : Ls) byL.push_back(level_estimates(crossing_levels(s, graph, center, L), hs, source.independent));
  rep.p.assign(hs.size(), {});
  for (std::size_t i = 0; i < hs.size(); ++i) {
    std::vector<double> Lv, pv;
    for (std::size_t j = 0; j < Ls.size(); ++j) {
      rep.p[i].push_back(byL[j][i]);
      Lv.push_back(Ls[j]);
      pv.push_back(byL[j][i].p);
    }
    rep.fits.push_back(fit_stretched_exponential(Lv, pv));
  }
  for (std::size_t j = 0; j < Ls.size(); ++j) {
    for (std::size_t i = 0; i < hs.size(); ++i) {
      for (std::size_t k = 0; k < hs.size(); ++k) {
        if (hs[k] > hs[i] && byL[j][k].p > byL[j][i].p) rep.monotone_in_h = false;
      }
    }
  }
  return rep;
}

}  // namespace ggl
