#include <cmath>
#include <map>

#include "doctest.h"
#include "helpers.hpp"
#include "ggl/green.hpp"
#include "ggl/hs_walk.hpp"
#include "ggl/sampler.hpp"
#include "ggl/stats.hpp"

using namespace ggl;
using ggl::test::v3;

namespace {

const LatticeGraph& nn3() {
  static const LatticeGraph g = LatticeGraph::nearest_neighbor(3);
  return g;
}

}  // namespace

TEST_CASE("quadratic walk exit distribution matches the SRW solve") {
  const Region box = Region::cube(3, Vertex{}, 2);
  const Region outer = boundary(nn3(), box, BoundaryKind::Outer);
  const Vertex x0 = v3(1, 0, -1);
  const auto oracle = hitting(nn3(), x0, outer, box.united(outer));
  // exit face = coordinate and sign of the exit vertex outside the box
  auto face = [](const Vertex& z) {
    for (int i = 0; i < 3; ++i)
      if (std::abs(z[i]) == 3) return 2 * i + (z[i] > 0 ? 0 : 1);
    return -1;
  };
  std::vector<double> p_face(6, 0.0);
  for (std::size_t i = 0; i < outer.size(); ++i) p_face[face(outer[i])] += oracle.nu.weights[i];
  const std::size_t n = 10000;
  std::vector<std::size_t> counts(6, 0);
  const std::vector<double> phi0(box.size(), 0.0);
  PairOptions o;
  o.record_path = false;
  for (std::size_t r = 0; r < n; ++r) {
    const auto [path, env] = simulate_pair(PotentialSpec::quadratic(), nn3(), box, Region(3, {}), {}, x0, phi0, 5, r, o);
    REQUIRE(path.status == WalkStatus::ExitedDomain);
    ++counts[face(path.vertices.back())];
  }
  for (int f = 0; f < 6; ++f) {
    const auto m = proportion(counts[f], n);
    CHECK(std::abs(m.mean - p_face[f]) <= 3.0 * std::sqrt(p_face[f] * (1 - p_face[f]) / n));
  }
}

TEST_CASE("realized jump rates stay in [1/c0, c0]") {
  const Region box = Region::cube(3, Vertex{}, 2);
  const auto p = PotentialSpec::log_cosh();
  SamplerOptions so;
  so.n_samples = 1;
  so.seed = 3;
  const auto init = sample_gibbs(p, nn3(), box, {}, so);
  std::vector<double> phi0(init.row(0).begin(), init.row(0).end());
  for (std::uint64_t r = 0; r < 50; ++r) {
    const auto [path, env] = simulate_pair(p, nn3(), box, Region(3, {}), {}, Vertex{}, phi0, 9, r);
    CHECK(env.evolved);
    CHECK(path.min_rate >= 1.0 / p.c0);
    CHECK(path.max_rate <= p.c0);
    for (std::size_t k = 1; k < path.vertices.size(); ++k) {
      CHECK(nn3().adjacent(path.vertices[k - 1], path.vertices[k]));
      CHECK(path.times[k] > path.times[k - 1]);
    }
  }
}

TEST_CASE("horizon zero gives an empty path") {
  const Region box = Region::cube(3, Vertex{}, 1);
  PairOptions o;
  o.horizon = 0.0;
  const auto [path, env] =
      simulate_pair(PotentialSpec::quadratic(), nn3(), box, Region(3, {}), {}, Vertex{}, std::vector<double>(27), 1, 0, o);
  CHECK(path.status == WalkStatus::Horizon);
  CHECK(path.vertices.size() == 1);
}

TEST_CASE("inter-jump times in a constant environment are exponential") {
  // V = η²/4: every edge has rate 1/2 while the thinning bound is c0 = 2.
  const auto p = PotentialSpec::quadratic(0.5);
  const Region box = Region::cube(3, Vertex{}, 8);
  const std::vector<double> phi0(box.size(), 0.0);
  std::vector<double> gaps;
  std::uint64_t r = 0;
  while (gaps.size() < 10000) {
    const auto [path, env] = simulate_pair(p, nn3(), box, Region(3, {}), {}, Vertex{}, phi0, 17, r++);
    for (std::size_t k = 1; k < path.times.size() && gaps.size() < 10000; ++k)
      gaps.push_back(path.times[k] - path.times[k - 1]);
  }
  const double rate = 0.5 * 6;
  const double ks = ks_one_sample(gaps, [&](double t) { return t <= 0 ? 0.0 : 1.0 - std::exp(-rate * t); });
  CHECK(ks < ks_critical(0.01, 10000));
}

TEST_CASE("hit_before_exit in the Gaussian environment") {
  const Region box = Region::cube(3, Vertex{}, 3);
  const Region target(3, {v3(2, 0, 0), v3(2, 1, 0)});
  const Vertex x0 = v3(-1, 0, 0);
  const auto est = hit_before_exit(PotentialSpec::quadratic(), nn3(), box, target, {}, x0, 10000, 21);
  const double p = hitting(nn3(), x0, target, box).p;
  CHECK(std::abs(est.p - p) <= 3.0 * std::sqrt(p * (1 - p) / 10000));
  CHECK(est.min_rate == 1.0);
  CHECK(est.max_rate == 1.0);

  const auto none = hit_before_exit(PotentialSpec::quadratic(), nn3(), box, Region(3, {}), {}, x0, 100, 1);
  CHECK(none.p == 0.0);
}

TEST_CASE("closure of a single vertex with one neighbour as target") {
  // From x0 the walk hits e1 first with 1/6; from any other neighbour it
  // returns with 1/6 or leaves, so p = 1/6 + (5/6)(1/6) p = 6/31.
  const Region lambda = ball(nn3(), Vertex{}, 1);
  const Region target(3, {unit_vector(0)});
  const double exact = 6.0 / 31.0;
  CHECK(hitting(nn3(), Vertex{}, target, lambda).p == doctest::Approx(exact).epsilon(1e-12));
  const auto est = hit_before_exit(PotentialSpec::quadratic(), nn3(), lambda, target, {}, Vertex{}, 20000, 4);
  CHECK(std::abs(est.p - exact) <= 3.0 * est.se);
  // Restricting the domain to {x0} ∪ S′ leaves the single uniform jump.
  const Region tiny(3, {Vertex{}, unit_vector(0)});
  const auto jump = hit_before_exit(PotentialSpec::quadratic(), nn3(), tiny, target, {}, Vertex{}, 20000, 5);
  CHECK(std::abs(jump.p - 1.0 / 6.0) <= 3.0 * jump.se);
}

TEST_CASE("W and the cross-section") {
  CHECK(cross_section_w(0.5) == 1.0);
  CHECK(cross_section_w(0.0) == 0.0);
  ggl::test::check_throws_code([] { cross_section_w(1.0); }, ErrorCode::DegenerateW);
  Rng rng(2);
  for (int t = 0; t < 100; ++t) {
    double a = rng.uniform() * 0.999, b = rng.uniform() * 0.999;
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    CHECK(cross_section_w(a) < cross_section_w(b));
  }

  const Region lambda = Region::cube(3, Vertex{}, 6);
  const Region S = ball(nn3(), Vertex{}, 1);
  const Region target = ball(nn3(), v3(4, 0, 0), 1);
  const auto empty = cross_section(PotentialSpec::quadratic(), nn3(), S, Region(3, {}), lambda, 10, 1);
  CHECK(empty.sigma == 0.0);
  const auto cs = cross_section(PotentialSpec::quadratic(), nn3(), S, target, lambda, 4000, 8);
  REQUIRE(cs.rows.size() == S.size());
  for (const auto& row : cs.rows) {
    const double p = hitting(nn3(), row.x, target, lambda).p;
    CHECK(std::abs(row.p - p) <= 3.0 * std::sqrt(p * (1 - p) / 4000));
  }
  CHECK(cs.ci.lo <= cs.sigma);
  CHECK(cs.sigma <= cs.ci.hi);
  CHECK(cs.sigma_srw > 0.0);
}

TEST_CASE("comparison with simple random walk") {
  const Region lambda = Region::cube(3, Vertex{}, 3);
  const Region U(3, {v3(2, 1, 0)});
  const auto q = compare_to_srw(PotentialSpec::quadratic(), nn3(), Vertex{}, U, lambda, 10000, 6);
  CHECK(q.sigma_x == 1.0);
  CHECK(q.lower == doctest::Approx(1.0 / 50.0));
  CHECK(q.upper == doctest::Approx(50.0));
  CHECK(std::abs(q.ratio - 1.0) <= 3.0 * q.se_env / q.p_srw);
  CHECK(q.within);
  const auto lc = compare_to_srw(PotentialSpec::log_cosh(), nn3(), v3(-1, 0, 0), Region(3, {v3(1, 1, 0)}),
                                 Region::cube(3, Vertex{}, 2), 1000, 7);
  CHECK(lc.within);
}

TEST_CASE("walk rejects unbounded conductances") {
  ggl::test::check_throws_code(
      [] {
        hit_before_exit(PotentialSpec::double_well(), nn3(), Region::cube(3, Vertex{}, 1), Region(3, {unit_vector(0)}),
                        {}, Vertex{}, 10, 1);
      },
      ErrorCode::MethodUnsupported);
}
