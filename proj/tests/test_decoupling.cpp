#include <cmath>
#include <functional>

#include "doctest.h"
#include "helpers.hpp"
#include "ggl/decoupling.hpp"
#include "ggl/events.hpp"
#include "ggl/field_source.hpp"
#include "ggl/green.hpp"
#include "ggl/stats.hpp"

using namespace ggl;
using ggl::test::v3;

namespace {

const LatticeGraph& nn3() {
  static const LatticeGraph g = LatticeGraph::nearest_neighbor(3);
  return g;
}

// Random AND/OR tree over literals on `sites`, with a parallel evaluator on
// a bit pattern for the brute-force oracle.
struct Tree {
  MonotoneEvent event;
  std::function<bool(unsigned)> truth;
};

Tree random_tree(Rng& rng, const std::vector<Vertex>& sites, int depth) {
  if (depth == 0 || rng.uniform() < 0.3) {
    const auto k = static_cast<unsigned>(rng.below(sites.size()));
    return {MonotoneEvent::literal(sites[k]), [k](unsigned bits) { return ((bits >> k) & 1u) != 0; }};
  }
  const std::size_t arity = 2 + rng.below(2);
  std::vector<MonotoneEvent> kids;
  std::vector<std::function<bool(unsigned)>> fs;
  for (std::size_t i = 0; i < arity; ++i) {
    auto t = random_tree(rng, sites, depth - 1);
    kids.push_back(t.event);
    fs.push_back(t.truth);
  }
  if (rng.uniform() < 0.5) {
    return {MonotoneEvent::all_of(kids), [fs](unsigned b) {
              for (const auto& f : fs)
                if (!f(b)) return false;
              return true;
            }};
  }
  return {MonotoneEvent::any_of(kids), [fs](unsigned b) {
            for (const auto& f : fs)
              if (f(b)) return true;
            return false;
          }};
}

}  // namespace

TEST_CASE("event evaluation conventions") {
  const Region r(3, {Vertex{}, unit_vector(0)});
  const FieldConfig f(r, {0.7, -1.0}, {});
  CHECK(evaluate_event(MonotoneEvent::literal(Vertex{}), f, 0.7));
  CHECK_FALSE(evaluate_event(MonotoneEvent::literal(Vertex{}), f, 0.7000001));
  const auto both_low = MonotoneEvent::any_of({MonotoneEvent::literal(Vertex{}), MonotoneEvent::literal(unit_vector(0))});
  CHECK_FALSE(evaluate_event(both_low, f, 1.0));
  ggl::test::check_throws_code([&] { evaluate_event(MonotoneEvent::literal(v3(5, 5, 5)), f, 0.0); },
                               ErrorCode::SupportOutsideRegion);
}

TEST_CASE("random event trees agree with exhaustive truth tables and are monotone") {
  std::vector<Vertex> sites;
  for (int i = 0; i < 6; ++i) sites.push_back(v3(i, 0, 0));
  const Region r(3, sites);
  Rng rng(19);
  for (int t = 0; t < 30; ++t) {
    const Tree tree = random_tree(rng, sites, 3);
    const CompiledEvent compiled(tree.event, r);
    for (unsigned bits = 0; bits < 64; ++bits) {
      std::vector<double> h(6);
      for (int k = 0; k < 6; ++k) h[k] = ((bits >> k) & 1u) ? 1.0 : -1.0;
      const FieldConfig f(r, h, {});
      CHECK(evaluate_event(tree.event, f, 0.0) == tree.truth(bits));
      CHECK(compiled.evaluate(h, 0.0) == tree.truth(bits));
    }
    for (int k = 0; k < 20; ++k) {
      std::vector<double> h(6), up(6);
      for (int i = 0; i < 6; ++i) {
        h[i] = rng.normal();
        up[i] = h[i] + (rng.uniform() < 0.5 ? 0.0 : rng.exponential(1.0));
      }
      if (evaluate_event(tree.event, FieldConfig(r, h, {}), 0.2)) {
        CHECK(evaluate_event(tree.event, FieldConfig(r, up, {}), 0.2));
      }
      CHECK(compiled.critical_level(up) >= compiled.critical_level(h));
    }
  }
}

TEST_CASE("error term formula") {
  CHECK(error_term_formula(1, 1, 1, 1, 1, 1, 2.0, 1.0) == doctest::Approx(std::exp(-3.0)).epsilon(1e-14));
  CHECK(error_term_formula(1, 1, 1, 1, 1, 1, 2.0, 1.0) == doctest::Approx(0.0498).epsilon(1e-3));
  CHECK(error_term_formula(2, 1, 3, 4, 1, 1, 1e-12, 1.0) == doctest::Approx(2 * 3 * std::exp(4.0)).epsilon(1e-12));
  Rng rng(6);
  for (int t = 0; t < 50; ++t) {
    const double c = 0.5 + rng.uniform(), s = 1 + rng.uniform(), e1 = 0.1 + rng.uniform(), e2 = e1 + 0.5;
    const double S1 = 0.1 + rng.uniform(), S2 = S1 + 0.3;
    CHECK(error_term_formula(1, 1, 2, 3, c, s, e2, S1) < error_term_formula(1, 1, 2, 3, c, s, e1, S1));
    CHECK(error_term_formula(1, 1, 2, 3, c, s, e1, S2) > error_term_formula(1, 1, 2, 3, c, s, e1, S1));
    CHECK(error_term_formula(1, 1, 2, 3, c, s, e1, S1) == error_term_formula(1, 1, 2, 3, c, s, e1, S1));
  }
  ConstantsConfig bad;
  bad.c2 = 0.0;
  ggl::test::check_throws_code([&] { bad.validate(); }, ErrorCode::ConfigError);
}

TEST_CASE("sprinkling threshold") {
  CHECK(sprinkling_threshold(0.5, 0.25) == doctest::Approx(2.5));
  CHECK(sprinkling_threshold(0.5, 1e12) == doctest::Approx(0.5));
  Rng rng(1);
  for (int t = 0; t < 50; ++t) CHECK(sprinkling_threshold(rng.exponential(1.0) + 1e-9, rng.exponential(1.0) + 1e-9) > 0.0);
}

TEST_CASE("Gaussian decoupling experiment against the bivariate oracle") {
  const Region lambda = Region::cube(3, Vertex{}, 3);
  const Vertex x = v3(-1, 0, 0), y = v3(1, 0, 0);
  const Region S(3, {x}), target(3, {y});
  const FieldSource src = gaussian_marginal_source(nn3(), lambda, {}, 1.0, 1.0, S.united(target));
  const double h = 0.2;
  const auto A = MonotoneEvent::literal(x);
  const auto f = Observable::indicator(MonotoneEvent::literal(y), h);
  const auto reps = decoupling_experiment(src, nn3(), lambda, S, target, A, f, h, {0.1, 0.3, 1.0, 50.0}, 40000, 3);
  const GreenOperator G(nn3(), lambda);
  const double vx = G(x, x) / 6, vy = G(y, y) / 6, cxy = G(x, y) / 6;
  const double joint = bivariate_normal_upper(h, h, vx, vy, cxy);
  const double px = normal_sf(h / std::sqrt(vx)), py = normal_sf(h / std::sqrt(vy));
  for (const auto& r : reps) {
    CHECK(r.pass);
    CHECK(std::abs(r.lhs.value - joint) <= 3.0 * r.lhs.se);
    CHECK(std::abs(r.lower - px * py) <= 3.0 * r.lower_se);
    const double sprinkled = normal_sf((h - r.eps) / std::sqrt(vx));
    CHECK(std::abs(r.upper - (sprinkled * py + r.delta)) <= 3.0 * r.upper_se + 1e-12);
    CHECK(r.mu_A_sprinkled.value >= r.mu_A_h.value);
  }
  // ε large: the sprinkled event is almost sure
  CHECK(reps.back().mu_A_sprinkled.value == 1.0);
  CHECK(reps.back().upper == doctest::Approx(reps.back().mean_f.value + reps.back().delta));
}

TEST_CASE("f = 1 reduces to pathwise nesting of level sets") {
  const Region lambda = Region::cube(3, Vertex{}, 2);
  const Region S(3, {Vertex{}}), target(3, {v3(2, 0, 0)});
  const FieldSource src = gaussian_marginal_source(nn3(), lambda, {}, 1.0, 1.0, S.united(target));
  const auto f = Observable::indicator(MonotoneEvent::literal(v3(2, 0, 0)), -1e300);
  const auto rs =
      decoupling_experiment(src, nn3(), lambda, S, target, MonotoneEvent::literal(Vertex{}), f, 0.1, {0.0001, 0.5}, 5000, 4);
  for (const auto& r : rs) {
    CHECK(r.mean_f.value == 1.0);
    CHECK(r.lhs.value == r.mu_A_h.value);
    CHECK(r.lhs.value <= r.mu_A_sprinkled.value);
    CHECK(r.upper_ok);
  }
  const auto stream = src.draw(2000, 9);
  const CompiledEvent ev(MonotoneEvent::literal(Vertex{}), src.sites);
  for (std::size_t i = 0; i < stream.n; ++i)
    for (double eps : {0.0, 0.1, 1.0}) CHECK((!ev.evaluate(stream.row(i), 0.3) || ev.evaluate(stream.row(i), 0.3 - eps)));
}

TEST_CASE("Brascamp-Lieb") {
  const Region lambda = Region::cube(3, Vertex{}, 2);
  const DiscreteMeasure delta0{Region(3, {Vertex{}}), {1.0}};
  // Gaussian with stiffness 1/c0: equality case
  const auto q = PotentialSpec::quadratic(0.5);
  const auto gsrc = gaussian_marginal_source(nn3(), lambda, {}, 0.5, 1.0, delta0.support);
  const auto eq = brascamp_lieb_check(q, nn3(), lambda, delta0, gsrc, 40000, 1);
  CHECK(std::abs(eq.z) <= 3.0);
  const auto none = brascamp_lieb_check(q, nn3(), lambda, DiscreteMeasure{Region(3, {}), {}}, gsrc, 10, 1);
  CHECK(none.lhs.value == 1.0);
  CHECK(none.rhs == 1.0);
  const auto p = PotentialSpec::log_cosh();
  SamplerOptions so;
  so.n_samples = 10000;
  const auto msrc = mcmc_source(p, nn3(), lambda, {}, so);
  for (std::uint64_t seed : {1, 2}) {
    const auto r = brascamp_lieb_check(p, nn3(), lambda, delta0, msrc, 10000, seed);
    CHECK(r.pass);
  }
}
