#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace ggl {

inline constexpr int kMaxDim = 4;

/// Integer lattice point; coordinates beyond the graph dimension stay zero.
using Vertex = std::array<std::int32_t, kMaxDim>;

Vertex make_vertex(std::initializer_list<int> coords);
Vertex unit_vector(int axis, int sign = 1);

inline Vertex operator+(const Vertex& a, const Vertex& b) {
  Vertex r;
  for (int i = 0; i < kMaxDim; ++i) r[i] = a[i] + b[i];
  return r;
}
inline Vertex operator-(const Vertex& a, const Vertex& b) {
  Vertex r;
  for (int i = 0; i < kMaxDim; ++i) r[i] = a[i] - b[i];
  return r;
}
inline Vertex operator-(const Vertex& a) {
  Vertex r;
  for (int i = 0; i < kMaxDim; ++i) r[i] = -a[i];
  return r;
}
inline Vertex operator*(std::int32_t s, const Vertex& a) {
  Vertex r;
  for (int i = 0; i < kMaxDim; ++i) r[i] = s * a[i];
  return r;
}

int l1_norm(const Vertex& v);
int linf_norm(const Vertex& v);
bool is_zero(const Vertex& v);
bool is_even(const Vertex& v);
std::string format_vertex(const Vertex& v, int dim, char sep = ' ');

struct VertexHash {
  std::size_t operator()(const Vertex& v) const noexcept {
    std::uint64_t h = 0x9E3779B97F4A7C15ull;
    for (auto c : v) {
      h ^= static_cast<std::uint32_t>(c) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

/// G = (Z^d, E) with E = {(x, x + y) : y in Gamma}.
class LatticeGraph {
 public:
  /// Validates 0 ∉ Γ, Γ = −Γ and that Γ generates Z^d.
  LatticeGraph(int dim, std::vector<Vertex> generators);

  static LatticeGraph nearest_neighbor(int dim);
  /// Γ = {x : |x|_1 = 2}; only valid as a re-indexed graph (see EvenSublattice).
  static std::vector<Vertex> l1_sphere(int dim, int radius);

  int dim() const { return dim_; }
  const std::vector<Vertex>& generators() const { return generators_; }
  std::size_t degree() const { return generators_.size(); }
  int max_step_l1() const { return max_step_l1_; }
  bool is_nearest_neighbor() const;

  std::vector<Vertex> neighbors(const Vertex& x) const;
  bool adjacent(const Vertex& x, const Vertex& y) const;
  /// Index of y - x in the generator list, or -1.
  int generator_index(const Vertex& step) const;

 private:
  int dim_;
  std::vector<Vertex> generators_;
  int max_step_l1_ = 0;
};

LatticeGraph build_lattice(int dim, std::vector<Vertex> generators);

/// Finite vertex set with lexicographic iteration order and O(1) membership.
class Region {
 public:
  Region() = default;
  Region(int dim, std::vector<Vertex> vertices);
  /// Full box lo <= x <= hi (coordinatewise); membership is arithmetic.
  static Region box(int dim, const Vertex& lo, const Vertex& hi);
  /// Cube of half-width radius around center.
  static Region cube(int dim, const Vertex& center, int radius);

  int dim() const { return dim_; }
  std::size_t size() const { return vertices_.size(); }
  bool empty() const { return vertices_.empty(); }
  const std::vector<Vertex>& vertices() const { return vertices_; }
  const Vertex& operator[](std::size_t i) const { return vertices_[i]; }
  auto begin() const { return vertices_.begin(); }
  auto end() const { return vertices_.end(); }

  bool contains(const Vertex& v) const { return index_of(v) >= 0; }
  std::ptrdiff_t index_of(const Vertex& v) const;

  Region united(const Region& other) const;
  Region minus(const Region& other) const;
  Region intersected(const Region& other) const;
  bool subset_of(const Region& other) const;
  bool disjoint_from(const Region& other) const;

  bool operator==(const Region& other) const {
    return dim_ == other.dim_ && vertices_ == other.vertices_;
  }

  /// One vertex per line, space-separated coordinates, sorted.
  void write(std::ostream& out) const;
  static Region read(std::istream& in, int dim);

 private:
  void build_index();

  int dim_ = 0;
  std::vector<Vertex> vertices_;
  std::unordered_map<Vertex, std::int64_t, VertexHash> index_;
  bool is_box_ = false;
  Vertex lo_{};
  Vertex hi_{};
  std::array<std::int64_t, kMaxDim> stride_{};
};

enum class Metric { Graph, L1, Linf };
enum class BoundaryKind { Outer, Inner, Closure };

Region ball(const LatticeGraph& graph, const Vertex& center, int radius, Metric metric = Metric::Graph);
Region boundary(const LatticeGraph& graph, const Region& region, BoundaryKind kind);

/// Graph distance by BFS, or nullopt if larger than limit.
std::optional<int> graph_distance(const LatticeGraph& graph, const Vertex& x, const Vertex& y, int limit);

/// Even sublattice Z^d_e with Γ̃ = {|x|_1 = 2}, re-indexed onto Z^d through the
/// basis v1 = e1 + e2, v2 = e2 - e1, v_k = e_k - e_{k-1} of Z^d_e.
class EvenSublattice {
 public:
  explicit EvenSublattice(int dim);

  const LatticeGraph& graph() const { return graph_; }
  int dim() const { return dim_; }
  /// Re-indexed coordinate u -> even vertex B u.
  Vertex to_lattice(const Vertex& u) const;
  /// Even vertex x -> u with B u = x; nullopt for odd x.
  std::optional<Vertex> from_lattice(const Vertex& x) const;

 private:
  static std::vector<Vertex> reindexed_generators(int dim);
  int dim_;
  LatticeGraph graph_;
};

EvenSublattice even_sublattice(int dim);

/// F*: every even vertex of the region has all 2d nearest neighbours inside.
/// Returns the first violating even vertex, if any.
std::optional<Vertex> f_star_violation(const Region& region);
inline bool is_f_star(const Region& region) { return !f_star_violation(region).has_value(); }

}  // namespace ggl
