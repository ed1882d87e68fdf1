#include "ggl/events.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "ggl/error.hpp"
#include "ggl/union_find.hpp"

namespace ggl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Region union_of(const std::vector<MonotoneEvent>& children) {
  std::vector<Vertex> all;
  int dim = 0;
  for (const auto& c : children) {
    dim = std::max(dim, c.support().dim());
    all.insert(all.end(), c.support().begin(), c.support().end());
  }
  return Region(dim, std::move(all));
}

std::vector<std::vector<std::int32_t>> local_adjacency(const Region& within, const std::vector<Vertex>& steps) {
  std::vector<std::vector<std::int32_t>> adj(within.size());
  for (std::size_t i = 0; i < within.size(); ++i) {
    for (const auto& g : steps) {
      const auto j = within.index_of(within[i] + g);
      if (j >= 0) adj[i].push_back(static_cast<std::int32_t>(j));
    }
  }
  return adj;
}

}  // namespace

double bottleneck_level(const std::vector<double>& heights, const std::vector<std::vector<std::int32_t>>& adj,
                        const std::vector<std::uint8_t>& is_from, const std::vector<std::uint8_t>& is_to) {
  const std::size_t n = heights.size();
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return heights[a] > heights[b] || (heights[a] == heights[b] && a < b);
  });
  UnionFind uf(n);
  std::vector<std::uint8_t> added(n, 0), has_from(n, 0), has_to(n, 0);
  for (std::uint32_t v : order) {
    added[v] = 1;
    std::uint32_t r = uf.find(v);
    has_from[r] = is_from[v];
    has_to[r] = is_to[v];
    for (std::int32_t w : adj[v]) {
      if (!added[static_cast<std::size_t>(w)]) continue;
      const std::uint32_t a = uf.find(r), b = uf.find(static_cast<std::uint32_t>(w));
      if (a == b) continue;
      const std::uint8_t f = has_from[a] | has_from[b], t = has_to[a] | has_to[b];
      r = uf.unite(a, b);
      has_from[r] = f;
      has_to[r] = t;
    }
    r = uf.find(v);
    // Every vertex added so far has height ≥ heights[v].
    if (has_from[r] && has_to[r]) return heights[v];
  }
  return -kInf;
}

MonotoneEvent MonotoneEvent::literal(const Vertex& x, int dim) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Literal;
  n->site = x;
  n->support = Region(dim, {x});
  return MonotoneEvent(std::move(n));
}

MonotoneEvent MonotoneEvent::all_of(std::vector<MonotoneEvent> children) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::And;
  n->support = union_of(children);
  n->children = std::move(children);
  return MonotoneEvent(std::move(n));
}

MonotoneEvent MonotoneEvent::any_of(std::vector<MonotoneEvent> children) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Or;
  n->support = union_of(children);
  n->children = std::move(children);
  return MonotoneEvent(std::move(n));
}

MonotoneEvent MonotoneEvent::crossing(const LatticeGraph& graph, Region from, Region to, Region within) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Crossing;
  n->from = std::move(from);
  n->to = std::move(to);
  n->within = std::move(within);
  n->steps = graph.generators();
  n->support = n->within;
  return MonotoneEvent(std::move(n));
}

MonotoneEvent MonotoneEvent::ball_crossing(const LatticeGraph& graph, const Vertex& y, int L) {
  if (L < 1) throw Error(ErrorCode::InvalidArgument, "crossing scale must be >= 1");
  Region inner = ball(graph, y, L);
  Region outer = ball(graph, y, 2 * L);
  Region shell = boundary(graph, outer, BoundaryKind::Outer);
  Region closure = boundary(graph, outer, BoundaryKind::Closure);
  return crossing(graph, std::move(inner), std::move(shell), std::move(closure));
}

bool MonotoneEvent::evaluate(const std::function<double(const Vertex&)>& value, double h) const {
  return critical_level(value) >= h;
}

double MonotoneEvent::critical_level(const std::function<double(const Vertex&)>& value) const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Literal: return value(n.site);
    case Kind::And: {
      double v = kInf;
      for (const auto& c : n.children) v = std::min(v, c.critical_level(value));
      return v;
    }
    case Kind::Or: {
      double v = -kInf;
      for (const auto& c : n.children) v = std::max(v, c.critical_level(value));
      return v;
    }
    case Kind::Crossing: {
      std::vector<double> heights(n.within.size());
      std::vector<std::uint8_t> f(n.within.size()), t(n.within.size());
      for (std::size_t i = 0; i < n.within.size(); ++i) {
        heights[i] = value(n.within[i]);
        f[i] = n.from.contains(n.within[i]);
        t[i] = n.to.contains(n.within[i]);
      }
      return bottleneck_level(heights, local_adjacency(n.within, n.steps), f, t);
    }
  }
  return -kInf;
}

CompiledEvent::CompiledEvent(const MonotoneEvent& event, const Region& sites) { root_ = compile(event, sites); }

std::int32_t CompiledEvent::compile(const MonotoneEvent& e, const Region& sites) {
  const auto& n = *e.node_;
  Op op;
  op.kind = n.kind;
  switch (n.kind) {
    case MonotoneEvent::Kind::Literal: {
      const auto idx = sites.index_of(n.site);
      if (idx < 0) throw Error(ErrorCode::SupportOutsideRegion, "literal outside the sampled sites");
      op.index = static_cast<std::int32_t>(idx);
      break;
    }
    case MonotoneEvent::Kind::And:
    case MonotoneEvent::Kind::Or:
      for (const auto& c : n.children) op.children.push_back(compile(c, sites));
      break;
    case MonotoneEvent::Kind::Crossing: {
      for (const auto& v : n.within) {
        const auto idx = sites.index_of(v);
        if (idx < 0) throw Error(ErrorCode::SupportOutsideRegion, "crossing support outside the sampled sites");
        op.local.push_back(static_cast<std::int32_t>(idx));
        op.is_from.push_back(n.from.contains(v));
        op.is_to.push_back(n.to.contains(v));
      }
      op.adj = local_adjacency(n.within, n.steps);
      break;
    }
  }
  ops_.push_back(std::move(op));
  return static_cast<std::int32_t>(ops_.size() - 1);
}

double CompiledEvent::level(std::int32_t id, std::span<const double> row) const {
  const Op& op = ops_[static_cast<std::size_t>(id)];
  switch (op.kind) {
    case MonotoneEvent::Kind::Literal: return row[static_cast<std::size_t>(op.index)];
    case MonotoneEvent::Kind::And: {
      double v = kInf;
      for (auto c : op.children) v = std::min(v, level(c, row));
      return v;
    }
    case MonotoneEvent::Kind::Or: {
      double v = -kInf;
      for (auto c : op.children) v = std::max(v, level(c, row));
      return v;
    }
    case MonotoneEvent::Kind::Crossing: {
      std::vector<double> heights(op.local.size());
      for (std::size_t i = 0; i < op.local.size(); ++i) heights[i] = row[static_cast<std::size_t>(op.local[i])];
      return bottleneck_level(heights, op.adj, op.is_from, op.is_to);
    }
  }
  return -kInf;
}

double CompiledEvent::critical_level(std::span<const double> row) const { return level(root_, row); }

bool evaluate_event(const MonotoneEvent& event, const FieldConfig& field, double h) {
  for (const auto& v : event.support()) {
    if (!field.region.contains(v)) {
      throw Error(ErrorCode::SupportOutsideRegion, "event support leaves the field region at " +
                                                       format_vertex(v, field.region.dim()));
    }
  }
  return event.evaluate([&](const Vertex& x) { return field.at(x); }, h);
}

}  // namespace ggl
