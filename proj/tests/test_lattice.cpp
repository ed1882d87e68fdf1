#include <algorithm>
#include <set>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "ggl/lattice.hpp"

using namespace ggl;
using ggl::test::v3;

TEST_CASE("nearest-neighbour graph has 2d neighbours equal to x + Gamma") {
  const auto g = LatticeGraph::nearest_neighbor(3);
  CHECK(g.degree() == 6);
  CHECK(g.is_nearest_neighbor());
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    const Vertex x = v3(int(rng.below(11)) - 5, int(rng.below(11)) - 5, int(rng.below(11)) - 5);
    const auto nb = g.neighbors(x);
    REQUIRE(nb.size() == g.generators().size());
    for (std::size_t k = 0; k < nb.size(); ++k) CHECK(nb[k] == x + g.generators()[k]);
  }
}

TEST_CASE("l1 sphere of radius 2 gives 18 neighbours and generates Z^3") {
  const auto gens = LatticeGraph::l1_sphere(3, 2);
  // brute-force count of |x|_1 = 2 in Z^3
  int count = 0;
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b)
      for (int c = -2; c <= 2; ++c)
        if (std::abs(a) + std::abs(b) + std::abs(c) == 2) ++count;
  CHECK(count == 18);
  CHECK(gens.size() == 18);
  const auto g = LatticeGraph::nearest_neighbor(3);
  auto mixed = g.generators();
  mixed.push_back(make_vertex({1, 1, 0}));
  mixed.push_back(make_vertex({-1, -1, 0}));
  CHECK(build_lattice(3, mixed).degree() == 8);
}

TEST_CASE("generator validation errors") {
  using ggl::test::check_throws_code;
  check_throws_code([] { build_lattice(3, {unit_vector(0, 1), unit_vector(0, -1)}); }, ErrorCode::NotGenerating);
  check_throws_code([] { build_lattice(3, {unit_vector(0, 1), Vertex{}, unit_vector(0, -1)}); },
                    ErrorCode::ZeroInGenerators);
  check_throws_code(
      [] {
        build_lattice(3, {unit_vector(0, 1), unit_vector(0, -1), unit_vector(1, 1), unit_vector(1, -1),
                          unit_vector(2, 1)});
      },
      ErrorCode::NotSymmetric);
  // {x : |x|_1 = 2} alone only reaches the even sublattice
  check_throws_code([] { build_lattice(3, LatticeGraph::l1_sphere(3, 2)); }, ErrorCode::NotGenerating);
}

TEST_CASE("ball sizes") {
  const auto g = LatticeGraph::nearest_neighbor(3);
  CHECK(ball(g, Vertex{}, 1).size() == 7);
  CHECK(ball(g, v3(3, -1, 2), 0).size() == 1);
  CHECK(ball(g, v3(3, -1, 2), 0)[0] == v3(3, -1, 2));
  CHECK(ball(g, Vertex{}, 2, Metric::L1).size() == 25);
  CHECK(ball(g, Vertex{}, 1, Metric::Linf).size() == 27);
  const LatticeGraph g18(3, [] {
    auto s = LatticeGraph::l1_sphere(3, 2);
    auto n = LatticeGraph::nearest_neighbor(3).generators();
    s.insert(s.end(), n.begin(), n.end());
    return s;
  }());
  CHECK(ball(g18, Vertex{}, 0).size() == 1);
  CHECK(ball(g18, Vertex{}, 1).size() == 25);
}

TEST_CASE("boundary examples") {
  const auto g = LatticeGraph::nearest_neighbor(3);
  const Region origin(3, {Vertex{}});
  const auto outer = boundary(g, origin, BoundaryKind::Outer);
  CHECK(outer.size() == 6);
  for (const auto& z : outer) CHECK(l1_norm(z) == 1);
  const auto b1 = ball(g, Vertex{}, 1);
  const auto inner = boundary(g, b1, BoundaryKind::Inner);
  CHECK(inner.size() == 6);
  CHECK_FALSE(inner.contains(Vertex{}));
  CHECK(boundary(g, origin, BoundaryKind::Closure) == b1);
}

TEST_CASE("boundaries agree with a brute-force double loop on random regions") {
  const auto g = LatticeGraph::nearest_neighbor(3);
  Rng rng(11);
  for (int t = 0; t < 25; ++t) {
    const Region r = ggl::test::random_region(rng, 3, 2, 0.4);
    std::set<Vertex> outer, inner;
    for (const auto& x : r) {
      for (const auto& z : g.neighbors(x)) {
        if (!r.contains(z)) {
          outer.insert(z);
          inner.insert(x);
        }
      }
    }
    const auto o = boundary(g, r, BoundaryKind::Outer);
    const auto i = boundary(g, r, BoundaryKind::Inner);
    const auto c = boundary(g, r, BoundaryKind::Closure);
    CHECK(o == Region(3, {outer.begin(), outer.end()}));
    CHECK(i == Region(3, {inner.begin(), inner.end()}));
    CHECK(o.disjoint_from(r));
    CHECK(i.subset_of(r));
    CHECK(c == r.united(o));
  }
}

TEST_CASE("regions are sorted sets with arithmetic box membership") {
  const Region r(3, {v3(1, 0, 0), v3(0, 0, 0), v3(1, 0, 0), v3(-1, 2, 0)});
  CHECK(r.size() == 3);
  CHECK(std::is_sorted(r.begin(), r.end()));
  const Region box = Region::box(3, v3(-1, -1, -1), v3(1, 2, 1));
  CHECK(box.size() == 3 * 4 * 3);
  for (std::size_t i = 0; i < box.size(); ++i) CHECK(box.index_of(box[i]) == std::ptrdiff_t(i));
  CHECK_FALSE(box.contains(v3(2, 0, 0)));
  const Region explicit_box(3, box.vertices());
  CHECK(explicit_box == box);
  CHECK(box.intersected(r).size() == 3);
  CHECK(box.minus(r).size() == box.size() - 3);

  std::stringstream ss;
  r.write(ss);
  CHECK(ss.str() == "-1 2 0\n0 0 0\n1 0 0\n");
  CHECK(Region::read(ss, 3) == r);
}

TEST_CASE("even sublattice generators and re-indexing isomorphism") {
  CHECK(even_sublattice(3).graph().degree() == 18);
  CHECK(even_sublattice(2).graph().degree() == 8);
  for (int d : {2, 3, 4}) {
    const EvenSublattice es(d);
    const auto& gens = es.graph().generators();
    std::set<Vertex> images;
    for (const auto& u : gens) {
      const Vertex x = es.to_lattice(u);
      CHECK(l1_norm(x) == 2);
      images.insert(x);
      CHECK(std::find(gens.begin(), gens.end(), -u) != gens.end());
    }
    CHECK(images.size() == gens.size());
  }
  const EvenSublattice es(3);
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    Vertex a = v3(int(rng.below(9)) - 4, int(rng.below(9)) - 4, int(rng.below(9)) - 4);
    Vertex b = a + v3(int(rng.below(5)) - 2, int(rng.below(5)) - 2, int(rng.below(5)) - 2);
    const auto ua = es.from_lattice(a), ub = es.from_lattice(b);
    CHECK(ua.has_value() == is_even(a));
    if (!ua || !ub) continue;
    CHECK(es.to_lattice(*ua) == a);
    const bool adjacent_even = l1_norm(a - b) == 2;
    CHECK(es.graph().adjacent(*ua, *ub) == adjacent_even);
  }
}

TEST_CASE("F* predicate") {
  const Region pair(3, {Vertex{}, unit_vector(0)});
  const auto bad = f_star_violation(pair);
  REQUIRE(bad.has_value());
  CHECK(*bad == Vertex{});
  const auto g = LatticeGraph::nearest_neighbor(3);
  CHECK(is_f_star(ball(g, Vertex{}, 3, Metric::L1)));
  CHECK(is_f_star(Region(3, {unit_vector(0)})));
}
