#include <cmath>
#include <numbers>

#include "doctest.h"
#include "helpers.hpp"
#include "ggl/potentials.hpp"
#include "ggl/quadrature.hpp"

using namespace ggl;
using ggl::test::v3;

namespace {

FieldConfig random_field(Rng& rng, const Region& r, double scale, BoundaryCondition bc = {}) {
  std::vector<double> h(r.size());
  for (auto& x : h) x = scale * rng.normal();
  return FieldConfig(r, h, bc);
}

}  // namespace

TEST_CASE("quadratic energy on a single site") {
  const auto g = LatticeGraph::nearest_neighbor(3);
  const FieldConfig f(Region(3, {Vertex{}}), {1.0}, {});
  const auto eg = hamiltonian_and_grad(PotentialSpec::quadratic(1.0), g, f);
  CHECK(eg.energy == doctest::Approx(3.0));
  CHECK(eg.gradient[0] == doctest::Approx(6.0));
}

TEST_CASE("constant field with matching boundary has zero gradient") {
  const auto g = LatticeGraph::nearest_neighbor(3);
  const Region box = Region::cube(3, Vertex{}, 1);
  for (const auto& p : {PotentialSpec::quadratic(1.5), PotentialSpec::log_cosh(), PotentialSpec::double_well()}) {
    const auto f = FieldConfig::constant(box, 2.5, BoundaryCondition::constant_value(2.5));
    const auto eg = hamiltonian_and_grad(p, g, f);
    for (double x : eg.gradient) CHECK(std::abs(x) < 1e-12);
    const auto f0 = FieldConfig::constant(box, 0.0, BoundaryCondition::constant_value(0.0));
    CHECK(eg.energy == doctest::Approx(hamiltonian_and_grad(p, g, f0).energy));
  }
}

TEST_CASE("gradient matches central finite differences") {
  const auto g = LatticeGraph::nearest_neighbor(3);
  const Region box = Region::cube(3, Vertex{}, 1);
  Rng rng(5);
  for (const auto& p : {PotentialSpec::quadratic(1.0), PotentialSpec::log_cosh(), PotentialSpec::double_well()}) {
    auto f = random_field(rng, box, 1.0, BoundaryCondition::constant_value(0.3));
    const auto eg = hamiltonian_and_grad(p, g, f);
    for (std::size_t i = 0; i < box.size(); ++i) {
      const double h = 1e-5;
      auto fp = f, fm = f;
      fp.heights[i] += h;
      fm.heights[i] -= h;
      const double fd = (hamiltonian_and_grad(p, g, fp).energy - hamiltonian_and_grad(p, g, fm).energy) / (2 * h);
      CHECK(fd == doctest::Approx(eg.gradient[i]).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("shift invariance and negation symmetry") {
  const auto g = LatticeGraph::nearest_neighbor(3);
  const Region box = Region::cube(3, Vertex{}, 1);
  Rng rng(9);
  const auto p = PotentialSpec::log_cosh();
  for (int t = 0; t < 50; ++t) {
    BoundaryCondition bc = BoundaryCondition::constant_value(rng.normal());
    bc.values[v3(2, 0, 0)] = rng.normal();
    const auto f = random_field(rng, box, 1.5, bc);
    const double c = 5.0 * rng.normal();
    auto fs = f;
    for (auto& x : fs.heights) x += c;
    fs.bc = bc.shifted(c);
    const auto a = hamiltonian_and_grad(p, g, f), b = hamiltonian_and_grad(p, g, fs);
    CHECK(b.energy == doctest::Approx(a.energy).epsilon(1e-9));
    for (std::size_t i = 0; i < box.size(); ++i) CHECK(b.gradient[i] == doctest::Approx(a.gradient[i]).epsilon(1e-9));
    auto fn = f;
    for (auto& x : fn.heights) x = -x;
    fn.bc = bc.negated();
    CHECK(hamiltonian_and_grad(p, g, fn).energy == doctest::Approx(a.energy).epsilon(1e-12));
  }
}

TEST_CASE("diagonal curvature equals the sum of conductances") {
  const auto g = LatticeGraph::nearest_neighbor(3);
  const Region box = Region::cube(3, Vertex{}, 1);
  Rng rng(13);
  const auto p = PotentialSpec::log_cosh();
  const auto f = random_field(rng, box, 1.0, BoundaryCondition::constant_value(-0.4));
  for (std::size_t i = 0; i < box.size(); ++i) {
    const double h = 1e-4;
    auto fp = f, fm = f;
    fp.heights[i] += h;
    fm.heights[i] -= h;
    const double d2 =
        (hamiltonian_and_grad(p, g, fp).gradient[i] - hamiltonian_and_grad(p, g, fm).gradient[i]) / (2 * h);
    double sum = 0.0;
    for (const auto& y : g.neighbors(box[i])) {
      const double a = conductance(p, g, f, box[i], y);
      sum += a;
      if (box.contains(y)) CHECK(conductance(p, g, f, y, box[i]) == doctest::Approx(a).epsilon(1e-14));
    }
    CHECK(std::abs(d2 - sum) < 1e-5);
  }
}

TEST_CASE("conductance examples") {
  const auto g = LatticeGraph::nearest_neighbor(3);
  const Region box = Region::cube(3, Vertex{}, 1);
  Rng rng(1);
  const auto f = random_field(rng, box, 3.0);
  for (const auto& y : g.neighbors(Vertex{})) CHECK(conductance(PotentialSpec::quadratic(), g, f, Vertex{}, y) == 1.0);
  const auto flat = FieldConfig::constant(box, 0.0, {});
  CHECK(conductance(PotentialSpec::log_cosh(), g, flat, Vertex{}, unit_vector(0)) == doctest::Approx(2.0));
  CHECK(conductance(PotentialSpec::double_well(), g, flat, Vertex{}, unit_vector(0)) == doctest::Approx(-2.0));
}

TEST_CASE("check_convexity on the built-in families") {
  const auto q = check_convexity(PotentialSpec::quadratic(1.0));
  CHECK(q.c0_lower == 1.0);
  CHECK(q.c0_upper == 1.0);
  CHECK(q.violations.empty());
  const auto lc = check_convexity(PotentialSpec::log_cosh());
  CHECK(lc.c0_lower >= 1.0);
  CHECK(lc.c0_lower < 1.0 + 1e-12);
  CHECK(lc.c0_upper == doctest::Approx(2.0));
  CHECK(lc.violations.empty());
  const auto dw = check_convexity(PotentialSpec::double_well());
  CHECK_FALSE(dw.violations.empty());
  CHECK(dw.c0_lower == doctest::Approx(-2.0));
}

TEST_CASE("effective even potential of a Gaussian base") {
  // U(η) = η² is the quadratic family with stiffness 2.
  const auto base = PotentialSpec::quadratic(2.0);
  const auto closed = effective_even_potential(base, 1.0, 1e-10, 3, true);
  const auto quad = effective_even_potential(base, 1.0, 1e-10, 3, false);
  const double zero[6] = {};
  CHECK(closed.effective->value(zero) == doctest::Approx(-0.5 * std::log(std::numbers::pi / 6.0)).epsilon(1e-12));
  CHECK(closed.effective->value(zero) == doctest::Approx(0.3235).epsilon(1e-3));
  Rng rng(21);
  for (int t = 0; t < 20; ++t) {
    double eta[6];
    double s = 0.0, s2 = 0.0;
    for (double& e : eta) {
      e = 2.0 * rng.normal();
      s += e;
      s2 += e * e;
    }
    const double beta = 1.0;
    const double formula = beta * (s2 - s * s / 6.0) - 0.5 * std::log(std::numbers::pi / (6.0 * beta));
    CHECK(closed.effective->value(eta) == doctest::Approx(formula).epsilon(1e-12));
    CHECK(std::abs(quad.effective->value(eta) - formula) < 1e-9);
  }
}

TEST_CASE("effective even gradient matches finite differences") {
  const auto eff = effective_even_potential(PotentialSpec::double_well(), 0.1, 1e-10, 3);
  Rng rng(4);
  double eta[6], grad[6];
  for (double& e : eta) e = rng.normal();
  eff.effective->evaluate(eta, grad);
  for (int k = 0; k < 6; ++k) {
    double ep[6], em[6];
    std::copy(eta, eta + 6, ep);
    std::copy(eta, eta + 6, em);
    ep[k] += 1e-4;
    em[k] -= 1e-4;
    const double fd = (eff.effective->value(ep) - eff.effective->value(em)) / 2e-4;
    CHECK(std::abs(fd - grad[k]) < 1e-6);
  }
}

TEST_CASE("double-well effective value against a fine trapezoid") {
  const double beta = 0.1, tol = 1e-10;
  const auto eff = effective_even_potential(PotentialSpec::double_well(), beta, tol, 3);
  const double zero[6] = {};
  // exp(-6β V(s)) with V = s² - log(s² + 1/2)
  auto integrand = [&](double s) { return std::pow(s * s + 0.5, 6 * beta) * std::exp(-6 * beta * s * s); };
  const double oracle = -std::log(trapezoid(integrand, -25.0, 25.0, 400000));
  CHECK(std::abs(eff.effective->value(zero) - oracle) < 10 * tol);
}

TEST_CASE("Gaussian effective conductances do not depend on the field") {
  const auto eff = effective_even_potential(PotentialSpec::quadratic(1.0), 0.7, 1e-10, 3);
  const Region r = Region::cube(3, Vertex{}, 2);
  Rng rng(8);
  const auto f1 = random_field(rng, r, 2.0), f2 = random_field(rng, r, 2.0);
  const auto g = LatticeGraph::nearest_neighbor(3);
  for (const Vertex& y : {v3(2, 0, 0), v3(1, 1, 0), v3(0, -1, 1)}) {
    const double a = conductance(eff, g, f1, Vertex{}, y);
    CHECK(a > 0.0);
    CHECK(conductance(eff, g, f2, Vertex{}, y) == doctest::Approx(a).epsilon(1e-10));
  }
}
