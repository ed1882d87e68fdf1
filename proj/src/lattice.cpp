#include "ggl/lattice.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "ggl/error.hpp"

namespace ggl {

Vertex make_vertex(std::initializer_list<int> coords) {
  if (coords.size() > static_cast<std::size_t>(kMaxDim)) {
    throw Error(ErrorCode::InvalidArgument, "vertex has more than kMaxDim coordinates");
  }
  Vertex v{};
  int i = 0;
  for (int c : coords) v[i++] = c;
  return v;
}

Vertex unit_vector(int axis, int sign) {
  Vertex v{};
  v[axis] = sign;
  return v;
}

int l1_norm(const Vertex& v) {
  int s = 0;
  for (auto c : v) s += c < 0 ? -c : c;
  return s;
}

int linf_norm(const Vertex& v) {
  int s = 0;
  for (auto c : v) s = std::max(s, c < 0 ? -c : c);
  return s;
}

bool is_zero(const Vertex& v) {
  return std::all_of(v.begin(), v.end(), [](auto c) { return c == 0; });
}

bool is_even(const Vertex& v) {
  int s = 0;
  for (auto c : v) s += c;
  return s % 2 == 0;
}

std::string format_vertex(const Vertex& v, int dim, char sep) {
  std::string out;
  for (int i = 0; i < dim; ++i) {
    if (i) out += sep;
    out += std::to_string(v[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------

LatticeGraph::LatticeGraph(int dim, std::vector<Vertex> generators) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw Error(ErrorCode::InvalidArgument, "dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  }
  if (generators.empty()) throw Error(ErrorCode::InvalidArgument, "empty generator set");
  for (const auto& g : generators) {
    for (int i = dim; i < kMaxDim; ++i) {
      if (g[i] != 0) throw Error(ErrorCode::InvalidArgument, "generator has coordinates beyond dim");
    }
  }
  std::sort(generators.begin(), generators.end());
  generators.erase(std::unique(generators.begin(), generators.end()), generators.end());
  for (const auto& g : generators) {
    if (is_zero(g)) throw Error(ErrorCode::ZeroInGenerators, "0 is a generator");
    if (!std::binary_search(generators.begin(), generators.end(), -g)) {
      throw Error(ErrorCode::NotSymmetric, "generator " + format_vertex(g, dim) + " has no negative");
    }
    max_step_l1_ = std::max(max_step_l1_, l1_norm(g));
  }
  generators_ = std::move(generators);

  // Words of length <= 4 max|γ|_1 must reach every unit vector.
  const int cap = 4 * max_step_l1_;
  std::unordered_set<Vertex, VertexHash> seen{Vertex{}};
  std::vector<Vertex> frontier{Vertex{}};
  for (int len = 0; len < cap && !frontier.empty(); ++len) {
    std::vector<Vertex> next;
    for (const auto& x : frontier) {
      for (const auto& g : generators_) {
        Vertex y = x + g;
        if (seen.insert(y).second) next.push_back(y);
      }
    }
    frontier = std::move(next);
  }
  for (int i = 0; i < dim; ++i) {
    if (!seen.count(unit_vector(i))) {
      throw Error(ErrorCode::NotGenerating,
                  "e_" + std::to_string(i + 1) + " not reachable within word length " + std::to_string(cap));
    }
  }
}

LatticeGraph LatticeGraph::nearest_neighbor(int dim) { return LatticeGraph(dim, l1_sphere(dim, 1)); }

std::vector<Vertex> LatticeGraph::l1_sphere(int dim, int radius) {
  std::vector<Vertex> out;
  Vertex v{};
  // Odometer over [-radius, radius]^dim.
  for (int i = 0; i < dim; ++i) v[i] = -radius;
  while (true) {
    if (l1_norm(v) == radius) out.push_back(v);
    int i = dim - 1;
    while (i >= 0 && v[i] == radius) v[i--] = -radius;
    if (i < 0) break;
    ++v[i];
  }
  return out;
}

bool LatticeGraph::is_nearest_neighbor() const {
  return generators_.size() == static_cast<std::size_t>(2 * dim_) && max_step_l1_ == 1;
}

std::vector<Vertex> LatticeGraph::neighbors(const Vertex& x) const {
  std::vector<Vertex> out;
  out.reserve(generators_.size());
  for (const auto& g : generators_) out.push_back(x + g);
  return out;
}

int LatticeGraph::generator_index(const Vertex& step) const {
  auto it = std::lower_bound(generators_.begin(), generators_.end(), step);
  if (it == generators_.end() || *it != step) return -1;
  return static_cast<int>(it - generators_.begin());
}

bool LatticeGraph::adjacent(const Vertex& x, const Vertex& y) const { return generator_index(y - x) >= 0; }

LatticeGraph build_lattice(int dim, std::vector<Vertex> generators) {
  return LatticeGraph(dim, std::move(generators));
}

// ---------------------------------------------------------------------------

Region::Region(int dim, std::vector<Vertex> vertices) : dim_(dim), vertices_(std::move(vertices)) {
  std::sort(vertices_.begin(), vertices_.end());
  vertices_.erase(std::unique(vertices_.begin(), vertices_.end()), vertices_.end());
  build_index();
}

Region Region::box(int dim, const Vertex& lo, const Vertex& hi) {
  Region r;
  r.dim_ = dim;
  r.is_box_ = true;
  r.lo_ = lo;
  r.hi_ = hi;
  std::int64_t total = 1;
  for (int i = dim - 1; i >= 0; --i) {
    r.stride_[i] = total;
    const std::int64_t extent = hi[i] - lo[i] + 1;
    if (extent <= 0) {
      total = 0;
      break;
    }
    total *= extent;
  }
  if (total == 0) {
    r.is_box_ = false;
    return r;
  }
  r.vertices_.reserve(static_cast<std::size_t>(total));
  Vertex v = lo;
  while (true) {
    r.vertices_.push_back(v);
    int i = dim - 1;
    while (i >= 0 && v[i] == hi[i]) {
      v[i] = lo[i];
      --i;
    }
    if (i < 0) break;
    ++v[i];
  }
  return r;
}

Region Region::cube(int dim, const Vertex& center, int radius) {
  Vertex lo = center, hi = center;
  for (int i = 0; i < dim; ++i) {
    lo[i] -= radius;
    hi[i] += radius;
  }
  return box(dim, lo, hi);
}

void Region::build_index() {
  index_.clear();
  index_.reserve(vertices_.size());
  for (std::size_t i = 0; i < vertices_.size(); ++i) index_.emplace(vertices_[i], static_cast<std::int64_t>(i));
}

std::ptrdiff_t Region::index_of(const Vertex& v) const {
  if (is_box_) {
    std::int64_t idx = 0;
    for (int i = 0; i < kMaxDim; ++i) {
      if (i >= dim_) {
        if (v[i] != 0) return -1;
        continue;
      }
      if (v[i] < lo_[i] || v[i] > hi_[i]) return -1;
      idx += (v[i] - lo_[i]) * stride_[i];
    }
    return static_cast<std::ptrdiff_t>(idx);
  }
  auto it = index_.find(v);
  return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

Region Region::united(const Region& other) const {
  std::vector<Vertex> all = vertices_;
  all.insert(all.end(), other.vertices_.begin(), other.vertices_.end());
  return Region(std::max(dim_, other.dim_), std::move(all));
}

Region Region::minus(const Region& other) const {
  std::vector<Vertex> out;
  for (const auto& v : vertices_) {
    if (!other.contains(v)) out.push_back(v);
  }
  return Region(dim_, std::move(out));
}

Region Region::intersected(const Region& other) const {
  std::vector<Vertex> out;
  for (const auto& v : vertices_) {
    if (other.contains(v)) out.push_back(v);
  }
  return Region(dim_, std::move(out));
}

bool Region::subset_of(const Region& other) const {
  return std::all_of(vertices_.begin(), vertices_.end(), [&](const Vertex& v) { return other.contains(v); });
}

bool Region::disjoint_from(const Region& other) const {
  return std::none_of(vertices_.begin(), vertices_.end(), [&](const Vertex& v) { return other.contains(v); });
}

void Region::write(std::ostream& out) const {
  for (const auto& v : vertices_) out << format_vertex(v, dim_) << '\n';
}

Region Region::read(std::istream& in, int dim) {
  std::vector<Vertex> vs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    Vertex v{};
    for (int i = 0; i < dim; ++i) {
      if (!(ls >> v[i])) throw Error(ErrorCode::IoError, "malformed region line: " + line);
    }
    vs.push_back(v);
  }
  return Region(dim, std::move(vs));
}

// ---------------------------------------------------------------------------

Region ball(const LatticeGraph& graph, const Vertex& center, int radius, Metric metric) {
  if (radius < 0) throw Error(ErrorCode::InvalidArgument, "negative radius");
  const int d = graph.dim();
  if (metric == Metric::Graph) {
    std::unordered_set<Vertex, VertexHash> seen{center};
    std::vector<Vertex> all{center};
    std::vector<Vertex> frontier{center};
    for (int r = 0; r < radius; ++r) {
      std::vector<Vertex> next;
      for (const auto& x : frontier) {
        for (const auto& g : graph.generators()) {
          Vertex y = x + g;
          if (seen.insert(y).second) {
            next.push_back(y);
            all.push_back(y);
          }
        }
      }
      frontier = std::move(next);
    }
    return Region(d, std::move(all));
  }
  std::vector<Vertex> out;
  for (const auto& v : Region::cube(d, center, radius)) {
    const Vertex diff = v - center;
    if (metric == Metric::Linf || l1_norm(diff) <= radius) out.push_back(v);
  }
  return Region(d, std::move(out));
}

Region boundary(const LatticeGraph& graph, const Region& region, BoundaryKind kind) {
  std::vector<Vertex> out;
  switch (kind) {
    case BoundaryKind::Outer:
      for (const auto& x : region) {
        for (const auto& g : graph.generators()) {
          Vertex z = x + g;
          if (!region.contains(z)) out.push_back(z);
        }
      }
      break;
    case BoundaryKind::Inner:
      for (const auto& x : region) {
        for (const auto& g : graph.generators()) {
          if (!region.contains(x + g)) {
            out.push_back(x);
            break;
          }
        }
      }
      break;
    case BoundaryKind::Closure:
      return region.united(boundary(graph, region, BoundaryKind::Outer));
  }
  return Region(graph.dim(), std::move(out));
}

std::optional<int> graph_distance(const LatticeGraph& graph, const Vertex& x, const Vertex& y, int limit) {
  if (x == y) return 0;
  std::unordered_set<Vertex, VertexHash> seen{x};
  std::vector<Vertex> frontier{x};
  for (int r = 1; r <= limit; ++r) {
    std::vector<Vertex> next;
    for (const auto& u : frontier) {
      for (const auto& g : graph.generators()) {
        Vertex v = u + g;
        if (v == y) return r;
        if (seen.insert(v).second) next.push_back(v);
      }
    }
    frontier = std::move(next);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

EvenSublattice::EvenSublattice(int dim) : dim_(dim), graph_(dim, reindexed_generators(dim)) {}

std::vector<Vertex> EvenSublattice::reindexed_generators(int dim) {
  if (dim < 2) throw Error(ErrorCode::InvalidArgument, "even sublattice needs d >= 2");
  // Map Γ̃ through the inverse basis.
  std::vector<Vertex> out;
  for (const auto& g : LatticeGraph::l1_sphere(dim, 2)) {
    Vertex u{};
    if (dim >= 3) {
      u[dim - 1] = g[dim - 1];
      for (int j = dim - 2; j >= 2; --j) u[j] = g[j] + u[j + 1];
    }
    const int s = g[1] + (dim >= 3 ? u[2] : 0);
    u[0] = (s + g[0]) / 2;
    u[1] = (s - g[0]) / 2;
    out.push_back(u);
  }
  return out;
}

Vertex EvenSublattice::to_lattice(const Vertex& u) const {
  Vertex x{};
  x[0] = u[0] - u[1];
  x[1] = u[0] + u[1];
  for (int k = 2; k < dim_; ++k) {
    x[k] += u[k];
    x[k - 1] -= u[k];
  }
  return x;
}

std::optional<Vertex> EvenSublattice::from_lattice(const Vertex& x) const {
  if (!is_even(x)) return std::nullopt;
  Vertex u{};
  if (dim_ >= 3) {
    u[dim_ - 1] = x[dim_ - 1];
    for (int j = dim_ - 2; j >= 2; --j) u[j] = x[j] + u[j + 1];
  }
  const int s = x[1] + (dim_ >= 3 ? u[2] : 0);
  u[0] = (s + x[0]) / 2;
  u[1] = (s - x[0]) / 2;
  return u;
}

EvenSublattice even_sublattice(int dim) { return EvenSublattice(dim); }

std::optional<Vertex> f_star_violation(const Region& region) {
  const int d = region.dim();
  for (const auto& x : region) {
    if (!is_even(x)) continue;
    for (int i = 0; i < d; ++i) {
      for (int s : {1, -1}) {
        if (!region.contains(x + unit_vector(i, s))) return x;
      }
    }
  }
  return std::nullopt;
}

}  // namespace ggl
