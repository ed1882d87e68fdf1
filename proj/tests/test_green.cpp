#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "ggl/green.hpp"

using namespace ggl;
using ggl::test::v3;

namespace {

const LatticeGraph& nn3() {
  static const LatticeGraph g = LatticeGraph::nearest_neighbor(3);
  return g;
}

Vertex random_vertex(Rng& rng, int r) {
  const int w = 2 * r + 1;
  return v3(int(rng.below(w)) - r, int(rng.below(w)) - r, int(rng.below(w)) - r);
}

}  // namespace

TEST_CASE("single-site domain has g = 1") {
  CHECK(green(nn3(), Region(3, {Vertex{}}), Vertex{}, Vertex{}).value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Green function is symmetric on a 9^3 box") {
  const Region box = Region::cube(3, Vertex{}, 4);
  const GreenOperator G(nn3(), box);
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const Vertex x = random_vertex(rng, 4), y = random_vertex(rng, 4);
    CHECK(std::abs(G(x, y) - G(y, x)) <= 1e-10);
    CHECK(G(x, x) > 0.0);
  }
}

TEST_CASE("Green function increases along nested boxes") {
  Rng rng(5);
  const GreenOperator a(nn3(), Region::cube(3, Vertex{}, 2));
  const GreenOperator b(nn3(), Region::cube(3, Vertex{}, 3));
  const GreenOperator c(nn3(), Region::cube(3, Vertex{}, 5));
  for (int t = 0; t < 20; ++t) {
    const Vertex x = random_vertex(rng, 2), y = random_vertex(rng, 2);
    CHECK(a(x, y) <= b(x, y) + 1e-12);
    CHECK(b(x, y) <= c(x, y) + 1e-12);
  }
}

TEST_CASE("infinite-volume g(0,0) and cap({0})") {
  const auto g = green(nn3(), Infinite{1e-3}, Vertex{}, Vertex{});
  CHECK(g.error_bound <= 1e-3);
  CHECK(std::abs(g.value - 1.516) <= 2e-3);
  const auto cap = capacity_infinite(nn3(), Region(3, {Vertex{}}), Infinite{1e-3});
  CHECK(std::abs(cap.cap - 1.0 / g.value) <= 1e-3);
  CHECK(std::abs(cap.cap - 0.6595) <= 1e-3);
}

TEST_CASE("pair capacity follows the 2x2 Green system") {
  const Vertex z = v3(6, 0, 0);
  const Region pair(3, {Vertex{}, z});
  const Infinite tight{1e-3};
  const auto row = green_row_infinite(nn3(), Vertex{}, {Vertex{}, z}, tight);
  // e = G⁻¹ 1 on the pair; by symmetry both weights are 1/(g00 + g0z)
  const double s = row.values[0] + row.values[1];
  const double formula = 2.0 / s;
  const auto cap = capacity_infinite(nn3(), pair, tight);
  const double propagated = 2.0 / (s * s) * 2.0 * row.error_bound + cap.error_bound;
  CHECK(std::abs(cap.cap - formula) <= propagated + 1e-6);
  const auto eq = equilibrium_and_capacity(nn3(), pair, Region::cube(3, v3(3, 0, 0), 12));
  CHECK(eq.e.weights[0] == doctest::Approx(eq.e.weights[1]).epsilon(1e-10));
  CHECK(eq.identity_residual <= 1e-6);
}

TEST_CASE("hitting a singleton follows the last-exit identity") {
  const Region box = Region::cube(3, Vertex{}, 4);
  const GreenOperator G(nn3(), box);
  const Vertex y = v3(1, 2, 0);
  for (const Vertex& x : {Vertex{}, v3(-3, 1, 2), v3(4, 4, 4)}) {
    const auto h = hitting(nn3(), x, Region(3, {y}), box);
    CHECK(h.p == doctest::Approx(G(x, y) / G(y, y)).epsilon(1e-9));
    CHECK(std::abs(h.nu.mass() - h.p) <= 1e-10);
  }
}

TEST_CASE("one uniform jump") {
  const Region domain(3, {Vertex{}, unit_vector(0)});
  const auto h = hitting(nn3(), Vertex{}, Region(3, {unit_vector(0)}), domain);
  CHECK(h.p == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("potential-theory identities on random small configurations") {
  Rng rng(17);
  const Region domain = Region::cube(3, Vertex{}, 7);
  const GreenOperator G(nn3(), domain);
  for (int t = 0; t < 30; ++t) {
    Region U = ggl::test::random_region(rng, 3, 1, 0.3);
    Vertex x = random_vertex(rng, 7);
    while (U.contains(x)) x = random_vertex(rng, 7);
    const auto h = hitting(nn3(), x, U, domain);
    const auto eq = equilibrium_and_capacity(nn3(), U, domain);
    double last_exit = 0.0;
    for (std::size_t i = 0; i < U.size(); ++i) last_exit += G(x, U[i]) * eq.e.weights[i];
    CHECK(std::abs(h.p - last_exit) <= 1e-9);
    CHECK(std::abs(h.nu.mass() - h.p) <= 1e-10);
    for (double w : h.nu.weights) CHECK(w >= 0.0);
    CHECK(eq.identity_residual <= 1e-6);
  }
}

TEST_CASE("capacity is subadditive") {
  Rng rng(23);
  const Region domain = Region::cube(3, v3(1, 0, 0), 10);
  for (int t = 0; t < 10; ++t) {
    const Region U = ggl::test::random_region(rng, 3, 1, 0.25);
    Region V = ggl::test::random_region(rng, 3, 1, 0.25);
    V = Region(3, [&] {
      std::vector<Vertex> s;
      for (const auto& v : V) s.push_back(v + v3(2, 0, 0));
      return s;
    }());
    const double cu = equilibrium_and_capacity(nn3(), U, domain).cap;
    const double cv = equilibrium_and_capacity(nn3(), V, domain).cap;
    const double cuv = equilibrium_and_capacity(nn3(), U.united(V), domain).cap;
    CHECK(cuv <= cu + cv + 1e-10);
  }
}

TEST_CASE("sigma ratios") {
  CHECK(sigma_ratio(nn3(), Vertex{}, Region(3, {v3(3, 1, 0)})) == 1.0);
  const int L = 1, R = 10;
  const Region U = ball(nn3(), v3(R * L, 0, 0), L);
  const double s = sigma_ratio(nn3(), Vertex{}, U, Infinite{1e-4});
  CHECK(s >= 1.0);
  CHECK(s <= 1.05 * (R + 1.0) / (R - 1.0));
}

TEST_CASE("potential-theory error paths") {
  ggl::test::check_throws_code(
      [] { equilibrium_and_capacity(nn3(), Region::cube(3, Vertex{}, 2), Region::cube(3, Vertex{}, 3)); },
      ErrorCode::MarginTooSmall);
  ggl::test::check_throws_code([] { green(nn3(), Infinite{1e-9, 8, 1.5, 20000}, Vertex{}, Vertex{}); },
                               ErrorCode::TolInfeasible);
}
