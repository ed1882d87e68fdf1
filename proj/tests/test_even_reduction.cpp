#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "ggl/even_reduction.hpp"
#include "ggl/rng.hpp"

using namespace ggl;
using ggl::test::v3;

namespace {

const LatticeGraph& nn3() {
  static const LatticeGraph g = LatticeGraph::nearest_neighbor(3);
  return g;
}

}  // namespace

TEST_CASE("region split of F* regions") {
  ggl::test::check_throws_code([] { reduce_region(Region(3, {Vertex{}, v3(1, 0, 0)}), 3); }, ErrorCode::NotFStar);

  const Region b3 = ball(nn3(), Vertex{}, 3, Metric::L1);
  const RegionSplit s = reduce_region(b3, 3);
  CHECK(s.even.size() + s.odd.size() == b3.size());
  for (const auto& v : s.even) CHECK(is_even(v));
  for (const auto& v : s.odd) CHECK_FALSE(is_even(v));
  CHECK(s.boundary.size() > 0);
  CHECK(s.boundaries_agree);
  CHECK(s.boundary == s.even_boundary);

  // a lone odd site has no even part, so only ∂Λ is nonempty
  const RegionSplit odd = reduce_region(Region(3, {v3(1, 0, 0)}), 3);
  CHECK(odd.even.size() == 0);
  CHECK(odd.boundary.size() == 6);
  CHECK_FALSE(odd.boundaries_agree);

  const Region hull = f_star_hull(Region(3, {Vertex{}, v3(1, 0, 0)}), 3);
  CHECK(hull.size() == 7);
  CHECK(is_f_star(hull));
  CHECK_NOTHROW(reduce_region(hull, 3));
}

TEST_CASE("l1 norm quadrature") {
  CHECK(l1_norm([](double) { return 1.0; }, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(l1_norm([](double x) { return std::sin(x); }, 0.0, 2 * M_PI) == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(l1_norm([](double x) { return x; }, -1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("perturbation curvature norms") {
  CHECK(perturbation_curvature_norm(PotentialSpec::quadratic(1.0)) == 0.0);
  CHECK(perturbation_curvature_norm(PotentialSpec::log_cosh()) == 0.0);
  CHECK(perturbation_curvature_norm(PotentialSpec::bump_well(1.0, 0.0, 1.0)) == 0.0);
  // g′ vanishes at 0 and ∞ with one extremum -√2 at 1/√2 on each half-line
  CHECK(perturbation_curvature_norm(PotentialSpec::double_well()) == doctest::Approx(4.0 * std::sqrt(2.0)).epsilon(1e-6));
  // bump: |g′| peaks at r/√5 with value 96a/(25√5 r)
  const double a = 0.7, r = 1.5;
  CHECK(perturbation_curvature_norm(PotentialSpec::bump_well(1.0, a, r)) ==
        doctest::Approx(4.0 * 96.0 * a / (25.0 * std::sqrt(5.0) * r)).epsilon(1e-9));
  ggl::test::check_throws_code(
      [] {
        const auto c = PotentialSpec::custom(
            "c", [](double x) { return x * x; }, [](double x) { return 2 * x; }, [](double) { return 2.0; }, 2, 2, true,
            1, 0);
        perturbation_curvature_norm(c);
      },
      ErrorCode::MethodUnsupported);
}

TEST_CASE("convex bases give a window covering every beta") {
  const auto w = convexity_window(PotentialSpec::log_cosh(), {0.1, 1.0, 5.0}, {-4.0, 4.0, 0.05});
  CHECK(w.g_norm == 0.0);
  REQUIRE(w.rows.size() == 3);
  for (const auto& row : w.rows) {
    CHECK(row.convex);
    CHECK(row.scaling == 0.0);
    CHECK(row.conductance_lo > 0.0);
  }
  CHECK(w.edge == 5.0);
}

TEST_CASE("double-well window edge is stable under grid refinement") {
  const std::vector<double> betas{0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.8, 1.2, 2.0};
  const auto coarse = convexity_window(PotentialSpec::double_well(), betas, {-6.0, 6.0, 0.02});
  const auto fine = convexity_window(PotentialSpec::double_well(), betas, {-6.0, 6.0, 0.01});
  REQUIRE(coarse.edge.has_value());
  REQUIRE(fine.edge.has_value());
  CHECK(coarse.rows.front().convex);
  CHECK_FALSE(coarse.rows.back().convex);
  MESSAGE("window edge ", *coarse.edge, " / ", *fine.edge, ", g'' norm ", coarse.g_norm);
  CHECK(std::abs(*coarse.edge - *fine.edge) <= 0.1 * *fine.edge);
  CHECK(coarse.rows[0].scaling == doctest::Approx(std::sqrt(0.02) * coarse.g_norm));
}

TEST_CASE("even traces of nearest-neighbour paths are even-graph paths") {
  Rng rng(12);
  for (int t = 0; t < 100; ++t) {
    std::vector<Vertex> path{v3(int(rng.below(3)), 0, 0)};
    for (int s = 0; s < 40; ++s) {
      path.push_back(path.back() + unit_vector(int(rng.below(3)), rng.uniform() < 0.5 ? 1 : -1));
    }
    const auto tr = even_trace(path);
    REQUIRE(!tr.empty());
    for (const auto& v : tr) CHECK(is_even(v));
    for (std::size_t i = 1; i < tr.size(); ++i) {
      CHECK(tr[i] != tr[i - 1]);
      CHECK(l1_norm(tr[i] - tr[i - 1]) <= 2);
    }
  }
  CHECK(even_projection(v3(1, 0, 0)) == v3(2, 0, 0));
  CHECK(even_projection(v3(1, 1, 0)) == v3(1, 1, 0));
  for (const auto& x : {v3(0, 0, 1), v3(-3, 2, 2), v3(5, 5, 5)}) {
    CHECK(is_even(even_projection(x)));
    CHECK(l1_norm(even_projection(x) - x) <= 1);
  }
}

TEST_CASE("Gaussian even marginals agree and a wrong beta is detected") {
  const Region b3 = ball(nn3(), Vertex{}, 3, Metric::L1);
  const std::vector<Vertex> sites{Vertex{}, v3(1, 1, 0), v3(2, 0, 0)};
  MarginalOptions opts;
  opts.n = 4000;
  opts.seed = 5;
  const auto rep = marginal_agreement_test(PotentialSpec::quadratic(1.0), 1.0, b3, sites, opts);
  CHECK(rep.pass);
  CHECK(rep.sites.size() == 3);
  for (const auto& s : rep.sites) {
    CHECK(s.ks < s.critical);
    MESSAGE("site var full ", s.var_full, " even ", s.var_even);
  }
  MarginalOptions bad = opts;
  bad.even_beta = 0.4;
  const auto neg = marginal_agreement_test(PotentialSpec::quadratic(1.0), 1.0, b3, sites, bad);
  CHECK_FALSE(neg.pass);
}

TEST_CASE("log-cosh even marginals agree") {
  const Region b = ball(nn3(), Vertex{}, 1, Metric::L1);
  MarginalOptions opts;
  opts.n = 3000;
  opts.seed = 9;
  const auto rep = marginal_agreement_test(PotentialSpec::log_cosh(), 1.0, b, {Vertex{}}, opts);
  CHECK(rep.pass);
  for (const auto& w : rep.warnings) MESSAGE(w);
}

TEST_CASE("tightness proxy") {
  const auto rep = tightness_proxy(PotentialSpec::quadratic(1.0), 1.0, {1, 2, 3}, 3000, 4);
  REQUIRE(rep.rows.size() == 3);
  for (const auto& r : rep.rows) CHECK(r.mean >= 1.0 - 3 * r.se);
  CHECK(rep.bounded);
  ggl::test::check_throws_code([] { tightness_proxy(PotentialSpec::quadratic(1.0), 1.0, {1, 2}, 10, 1); },
                               ErrorCode::InvalidArgument);
}
