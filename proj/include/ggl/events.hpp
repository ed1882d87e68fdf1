#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "ggl/lattice.hpp"
#include "ggl/potentials.hpp"

namespace ggl {

/// Increasing event in the occupation variables Y_x = 1{φ_x ≥ h}: literals
/// combined by AND/OR, plus crossing nodes {K ↔ K′ inside D}. No negation,
/// so raising any height never turns the event off.
class MonotoneEvent {
 public:
  enum class Kind { Literal, And, Or, Crossing };

  static MonotoneEvent literal(const Vertex& x, int dim = 3);
  static MonotoneEvent all_of(std::vector<MonotoneEvent> children);
  static MonotoneEvent any_of(std::vector<MonotoneEvent> children);
  /// Some occupied nearest-neighbour path inside `within` meets both K and K′.
  static MonotoneEvent crossing(const LatticeGraph& graph, Region from, Region to, Region within);
  /// {B(y, L) ↔ ∂B(y, 2L)} in the graph metric, searched in the closure of B(y, 2L).
  static MonotoneEvent ball_crossing(const LatticeGraph& graph, const Vertex& y, int L);

  Kind kind() const { return node_->kind; }
  const Region& support() const { return node_->support; }

  /// Evaluates on the occupation pattern occupied(x) = value(x) ≥ h.
  bool evaluate(const std::function<double(const Vertex&)>& value, double h) const;

  /// Largest h with the event true: the event holds at level h iff h ≤ critical_level.
  double critical_level(const std::function<double(const Vertex&)>& value) const;

 private:
  struct Node {
    Kind kind = Kind::Literal;
    Vertex site{};
    std::vector<MonotoneEvent> children;
    Region from, to, within;
    std::vector<Vertex> steps;
    Region support;
  };
  explicit MonotoneEvent(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
  friend class CompiledEvent;
};

/// Event bound to a fixed site ordering for fast evaluation on sample rows.
class CompiledEvent {
 public:
  CompiledEvent(const MonotoneEvent& event, const Region& sites);

  bool evaluate(std::span<const double> row, double h) const { return critical_level(row) >= h; }
  double critical_level(std::span<const double> row) const;

 private:
  struct Op {
    MonotoneEvent::Kind kind;
    std::int32_t index = -1;            // literal row index
    std::vector<std::int32_t> children; // op indices
    std::vector<std::int32_t> local;    // crossing: row index of each local vertex
    std::vector<std::uint8_t> is_from, is_to;
    std::vector<std::vector<std::int32_t>> adj;
  };
  std::int32_t compile(const MonotoneEvent& e, const Region& sites);
  double level(std::int32_t op, std::span<const double> row) const;

  std::vector<Op> ops_;
  std::int32_t root_ = -1;
};

/// Bottleneck level of a crossing: the largest h for which some path from a
/// `from` vertex to a `to` vertex uses only heights ≥ h.
double bottleneck_level(const std::vector<double>& heights, const std::vector<std::vector<std::int32_t>>& adj,
                        const std::vector<std::uint8_t>& is_from, const std::vector<std::uint8_t>& is_to);

/// SupportOutsideRegion unless the support lies inside the field's region.
bool evaluate_event(const MonotoneEvent& event, const FieldConfig& field, double h);

}  // namespace ggl
