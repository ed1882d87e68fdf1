#include "ggl/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "ggl/energy_model.hpp"
#include "ggl/error.hpp"
#include "ggl/quadrature.hpp"
#include "ggl/rng.hpp"

namespace ggl {

std::string to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::Quadratic: return "quadratic";
    case PotentialKind::LogCosh: return "log_cosh";
    case PotentialKind::DoubleWell: return "double_well";
    case PotentialKind::BumpWell: return "bump_well";
    case PotentialKind::Custom: return "custom";
    case PotentialKind::EffectiveEven: return "effective_even";
  }
  return "unknown";
}

namespace {

double log_cosh_value(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

double sech2(double x) {
  const double c = std::cosh(x);
  return std::isfinite(c) ? 1.0 / (c * c) : 0.0;
}

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be positive and finite");
  }
}

}  // namespace

PotentialSpec PotentialSpec::quadratic(double stiffness, double beta) {
  require_positive(stiffness, "stiffness");
  require_positive(beta, "beta");
  PotentialSpec p;
  p.kind = PotentialKind::Quadratic;
  p.name = "quadratic";
  p.beta = beta;
  p.stiffness = stiffness;
  p.d2v_lo = p.d2v_hi = stiffness;
  p.c0 = std::max(stiffness, 1.0 / stiffness);
  p.A = stiffness / 2.0;
  p.B = 0.0;
  return p;
}

PotentialSpec PotentialSpec::log_cosh(double beta) {
  require_positive(beta, "beta");
  PotentialSpec p;
  p.kind = PotentialKind::LogCosh;
  p.name = "log_cosh";
  p.beta = beta;
  p.d2v_lo = 1.0;
  p.d2v_hi = 2.0;
  p.c0 = 2.0;
  p.A = 0.5;
  p.B = 0.0;
  return p;
}

PotentialSpec PotentialSpec::double_well(double beta) {
  require_positive(beta, "beta");
  PotentialSpec p;
  p.kind = PotentialKind::DoubleWell;
  p.name = "double_well";
  p.beta = beta;
  // V'' = 2 - (1 - 2η²)/(η² + 1/2)² ranges over [-2, 5/2].
  p.d2v_lo = -2.0;
  p.d2v_hi = 2.5;
  p.c0 = 2.5;
  p.convex = false;
  p.stiffness = 2.0;
  p.A = 0.5;
  p.B = 0.0;
  return p;
}

PotentialSpec PotentialSpec::bump_well(double stiffness, double amplitude, double radius, double beta) {
  require_positive(stiffness, "stiffness");
  require_positive(radius, "radius");
  require_positive(beta, "beta");
  PotentialSpec p;
  p.kind = PotentialKind::BumpWell;
  p.name = "bump_well";
  p.beta = beta;
  p.stiffness = stiffness;
  p.bump_amplitude = amplitude;
  p.bump_radius = radius;
  // g'' = -6a (1 - u²)(1 - 5u²)/r² with u = η/r spans [-6a/r², 4.8a/r²].
  const double s = amplitude / (radius * radius);
  p.d2v_lo = stiffness + std::min(-6.0 * s, 4.8 * s);
  p.d2v_hi = stiffness + std::max(-6.0 * s, 4.8 * s);
  p.convex = p.d2v_lo > 0.0;
  p.c0 = p.convex ? std::max(p.d2v_hi, 1.0 / p.d2v_lo) : std::max(p.d2v_hi, -p.d2v_lo);
  p.A = stiffness / 2.0;
  p.B = std::max(0.0, -amplitude);
  return p;
}

PotentialSpec PotentialSpec::custom(std::string name, std::function<double(double)> v,
                                    std::function<double(double)> dv, std::function<double(double)> d2v,
                                    double d2v_lo, double d2v_hi, bool convex, double A, double B, double beta) {
  require_positive(beta, "beta");
  require_positive(A, "A");
  if (convex && !(d2v_lo > 0.0)) throw Error(ErrorCode::InvalidArgument, "convex potential needs d2v_lo > 0");
  PotentialSpec p;
  p.kind = PotentialKind::Custom;
  p.name = std::move(name);
  p.beta = beta;
  p.custom_v = std::move(v);
  p.custom_dv = std::move(dv);
  p.custom_d2v = std::move(d2v);
  p.d2v_lo = d2v_lo;
  p.d2v_hi = d2v_hi;
  p.convex = convex;
  p.c0 = convex ? std::max(d2v_hi, 1.0 / d2v_lo) : std::max(d2v_hi, -d2v_lo);
  p.A = A;
  p.B = B;
  return p;
}

PotentialSpec PotentialSpec::with_beta(double b) const {
  require_positive(b, "beta");
  if (kind == PotentialKind::EffectiveEven) {
    return effective_even_potential(effective->base(), b, effective->tol(), effective->dim(),
                                    effective->uses_closed_form());
  }
  PotentialSpec p = *this;
  p.beta = b;
  return p;
}

double PotentialSpec::v(double eta) const {
  switch (kind) {
    case PotentialKind::Quadratic: return 0.5 * stiffness * eta * eta;
    case PotentialKind::LogCosh: return 0.5 * eta * eta + log_cosh_value(eta);
    case PotentialKind::DoubleWell: return eta * eta - std::log(eta * eta + 0.5);
    case PotentialKind::BumpWell: return u(eta) + g(eta);
    case PotentialKind::Custom: return custom_v(eta);
    case PotentialKind::EffectiveEven: break;
  }
  throw Error(ErrorCode::MethodUnsupported, "v() on an effective even potential");
}

double PotentialSpec::dv(double eta) const {
  switch (kind) {
    case PotentialKind::Quadratic: return stiffness * eta;
    case PotentialKind::LogCosh: return eta + std::tanh(eta);
    case PotentialKind::DoubleWell: return 2.0 * eta - 2.0 * eta / (eta * eta + 0.5);
    case PotentialKind::BumpWell: {
      const double x = eta / bump_radius;
      const double w = 1.0 - x * x;
      const double dg = std::abs(x) < 1.0 ? -6.0 * bump_amplitude * x * w * w / bump_radius : 0.0;
      return stiffness * eta + dg;
    }
    case PotentialKind::Custom: return custom_dv(eta);
    case PotentialKind::EffectiveEven: break;
  }
  throw Error(ErrorCode::MethodUnsupported, "dv() on an effective even potential");
}

double PotentialSpec::d2v(double eta) const {
  switch (kind) {
    case PotentialKind::Quadratic: return stiffness;
    case PotentialKind::LogCosh: return 1.0 + sech2(eta);
    case PotentialKind::DoubleWell: {
      const double q = eta * eta + 0.5;
      return 2.0 - (1.0 - 2.0 * eta * eta) / (q * q);
    }
    case PotentialKind::BumpWell: return stiffness + d2g(eta);
    case PotentialKind::Custom: return custom_d2v(eta);
    case PotentialKind::EffectiveEven: break;
  }
  throw Error(ErrorCode::MethodUnsupported, "d2v() on an effective even potential");
}

double PotentialSpec::u(double eta) const {
  switch (kind) {
    case PotentialKind::DoubleWell: return eta * eta;
    case PotentialKind::BumpWell: return 0.5 * stiffness * eta * eta;
    default: return v(eta);
  }
}

double PotentialSpec::g(double eta) const {
  switch (kind) {
    case PotentialKind::DoubleWell: return -std::log(eta * eta + 0.5);
    case PotentialKind::BumpWell: {
      const double x = eta / bump_radius;
      if (std::abs(x) >= 1.0) return 0.0;
      const double w = 1.0 - x * x;
      return bump_amplitude * w * w * w;
    }
    default: return 0.0;
  }
}

double PotentialSpec::d2g(double eta) const {
  switch (kind) {
    case PotentialKind::DoubleWell: {
      const double q = eta * eta + 0.5;
      return -(1.0 - 2.0 * eta * eta) / (q * q);
    }
    case PotentialKind::BumpWell: {
      const double x = eta / bump_radius;
      if (std::abs(x) >= 1.0) return 0.0;
      return -6.0 * bump_amplitude * (1.0 - x * x) * (1.0 - 5.0 * x * x) / (bump_radius * bump_radius);
    }
    default: return 0.0;
  }
}

std::optional<double> PotentialSpec::g_support() const {
  if (kind == PotentialKind::BumpWell && bump_amplitude != 0.0) return bump_radius;
  return std::nullopt;
}

// ---------------------------------------------------------------------------

BoundaryCondition BoundaryCondition::shifted(double c) const {
  BoundaryCondition b{constant + c, values};
  for (auto& kv : b.values) kv.second += c;
  return b;
}

BoundaryCondition BoundaryCondition::negated() const {
  BoundaryCondition b{-constant, values};
  for (auto& kv : b.values) kv.second = -kv.second;
  return b;
}

FieldConfig::FieldConfig(Region r, std::vector<double> h, BoundaryCondition b)
    : region(std::move(r)), heights(std::move(h)), bc(std::move(b)) {
  if (heights.size() != region.size()) {
    throw Error(ErrorCode::InvalidArgument, "heights size does not match region");
  }
}

FieldConfig FieldConfig::constant(Region r, double value, BoundaryCondition b) {
  std::vector<double> h(r.size(), value);
  return FieldConfig(std::move(r), std::move(h), std::move(b));
}

double FieldConfig::at(const Vertex& x) const {
  const auto i = region.index_of(x);
  return i >= 0 ? heights[static_cast<std::size_t>(i)] : bc.value(x);
}

void FieldConfig::validate() const {
  if (heights.size() != region.size()) throw Error(ErrorCode::InvalidArgument, "heights size mismatch");
  for (double h : heights) {
    if (!std::isfinite(h)) throw Error(ErrorCode::InvalidArgument, "non-finite height");
  }
}

EnergyGrad hamiltonian_and_grad(const PotentialSpec& potential, const LatticeGraph& graph, const FieldConfig& field) {
  field.validate();
  auto model = make_energy_model(potential, graph, field.region, field.bc);
  EnergyGrad out;
  out.energy = model->energy_and_gradient(field.heights, out.gradient);
  if (!std::isfinite(out.energy)) throw Error(ErrorCode::NonFiniteEnergy, "energy overflow");
  for (double g : out.gradient) {
    if (!std::isfinite(g)) throw Error(ErrorCode::NonFiniteEnergy, "gradient overflow");
  }
  return out;
}

double conductance(const PotentialSpec& potential, const LatticeGraph& graph, const FieldConfig& field,
                   const Vertex& x, const Vertex& y) {
  if (!field.region.contains(x)) throw Error(ErrorCode::InvalidArgument, "conductance: x not in region");
  if (potential.two_body()) {
    if (!graph.adjacent(x, y)) throw Error(ErrorCode::InvalidArgument, "conductance: (x,y) not an edge");
    const double a = potential.d2v(field.at(y) - field.at(x));
    if (potential.convex) {
      const double lo = 1.0 / potential.c0, hi = potential.c0;
      if (a < lo - 1e-9 || a > hi + 1e-9) {
        throw Error(ErrorCode::EllipticityViolation, "conductance " + std::to_string(a) + " outside [1/c0, c0]");
      }
    }
    return a;
  }
  // Effective even: sum over odd common neighbours z of x and y.
  const auto& ev = *potential.effective;
  const int d = ev.dim();
  const Vertex diff = y - x;
  if (l1_norm(diff) != 2 || !is_even(x)) {
    throw Error(ErrorCode::InvalidArgument, "conductance: (x,y) not an edge of the even graph");
  }
  const int n = ev.arity();
  std::vector<double> eta(n), grad(n), hess(static_cast<std::size_t>(n * n));
  double total = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int s : {1, -1}) {
      const Vertex z = x + unit_vector(i, s);
      if (l1_norm(y - z) != 1) continue;
      int sx = -1, sy = -1;
      for (int k = 0; k < n; ++k) {
        const Vertex w = z + unit_vector(k / 2, k % 2 == 0 ? 1 : -1);
        eta[k] = field.at(w);
        if (w == x) sx = k;
        if (w == y) sy = k;
      }
      ev.evaluate(eta.data(), grad.data(), hess.data());
      total -= hess[static_cast<std::size_t>(sx * n + sy)];
    }
  }
  return total;
}

ConvexityReport check_convexity(const PotentialSpec& potential, const ConvexityGrid& grid) {
  if (!(grid.step > 0.0) || grid.hi < grid.lo) throw Error(ErrorCode::InvalidArgument, "bad convexity grid");
  ConvexityReport rep;
  rep.c0_lower = std::numeric_limits<double>::infinity();
  rep.c0_upper = -std::numeric_limits<double>::infinity();
  const std::size_t count = static_cast<std::size_t>(std::floor((grid.hi - grid.lo) / grid.step + 1e-9)) + 1;
  if (potential.two_body()) {
    const double lo = potential.convex ? 1.0 / potential.c0 : std::numeric_limits<double>::min();
    const double hi = potential.convex ? potential.c0 : std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < count; ++k) {
      const double eta = grid.lo + grid.step * static_cast<double>(k);
      const double a = potential.d2v(eta);
      rep.c0_lower = std::min(rep.c0_lower, a);
      rep.c0_upper = std::max(rep.c0_upper, a);
      if (a < lo - 1e-9 || a > hi + 1e-9) rep.violations.push_back(eta);
    }
    return rep;
  }
  // Effective even: summed conductances of the two edge types of G̃ at
  // random height probes. Edges x ± 2e_i see one odd midpoint, edges
  // x + e_i ± e_j see two.
  const auto& ev = *potential.effective;
  const int n = ev.arity();
  const std::size_t probes = std::min<std::size_t>(count, 2000);
  Rng rng(0x636f6e76ull, 0);
  std::vector<double> eta(n), grad(n), hess(static_cast<std::size_t>(n * n));
  auto factor_conductance = [&](int a, int b) {
    for (int k = 0; k < n; ++k) eta[k] = grid.lo + (grid.hi - grid.lo) * rng.uniform();
    ev.evaluate(eta.data(), grad.data(), hess.data());
    return -hess[static_cast<std::size_t>(a * n + b)];
  };
  for (std::size_t p = 0; p < probes; ++p) {
    // Slots 2i, 2i+1 are y + e_i, y - e_i.
    const double straight = factor_conductance(0, 1);
    const double diagonal = factor_conductance(0, 2) + factor_conductance(0, 2);
    for (double a : {straight, diagonal}) {
      rep.c0_lower = std::min(rep.c0_lower, a);
      rep.c0_upper = std::max(rep.c0_upper, a);
      if (!(a > 0.0)) rep.violations.push_back(static_cast<double>(p));
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

EffectiveEvenPotential::EffectiveEvenPotential(PotentialSpec base, double beta, double tol, int dim,
                                               bool closed_form)
    : base_(std::move(base)), beta_(beta), tol_(tol), dim_(dim), closed_form_(closed_form) {
  if (!base_.two_body()) throw Error(ErrorCode::InvalidArgument, "effective potential needs a two-body base");
  require_positive(beta, "beta");
  require_positive(tol, "tol");
  if (dim < 1 || dim > kMaxDim) throw Error(ErrorCode::InvalidArgument, "bad dimension");
  if (!(base_.A > 0.0)) throw Error(ErrorCode::InvalidArgument, "base needs V >= A η² - B with A > 0");
}

double EffectiveEvenPotential::gaussian_value(const double* eta) const {
  if (base_.kind != PotentialKind::Quadratic) {
    throw Error(ErrorCode::MethodUnsupported, "closed form needs a quadratic base");
  }
  const int n = arity();
  const double k = base_.stiffness;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    s += eta[i];
    s2 += eta[i] * eta[i];
  }
  return 0.5 * beta_ * k * (s2 - s * s / n) - 0.5 * std::log(2.0 * std::numbers::pi / (beta_ * k * n));
}

std::optional<double> EffectiveEvenPotential::diagonal_curvature() const {
  if (base_.kind != PotentialKind::Quadratic) return std::nullopt;
  return beta_ * base_.stiffness * (1.0 - 1.0 / arity());
}

double EffectiveEvenPotential::value(const double* eta) const { return evaluate(eta, nullptr, nullptr); }

double EffectiveEvenPotential::evaluate(const double* eta, double* grad, double* hess) const {
  const int n = arity();
  if (closed_form_ && base_.kind == PotentialKind::Quadratic) {
    const double bk = beta_ * base_.stiffness;
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += eta[i];
    mean /= n;
    if (grad) {
      for (int i = 0; i < n; ++i) grad[i] = bk * (eta[i] - mean);
    }
    if (hess) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) hess[i * n + j] = bk * ((i == j ? 1.0 : 0.0) - 1.0 / n);
      }
    }
    return gaussian_value(eta);
  }
  return integrate(eta, grad, hess);
}

double EffectiveEvenPotential::integrate(const double* eta, double* grad, double* hess) const {
  const int n = arity();
  const double beta = beta_;
  const PotentialSpec& V = base_;
  auto exponent = [&](double s) {
    double e = 0.0;
    for (int i = 0; i < n; ++i) e += V.v(eta[i] - s);
    return beta * e;
  };

  // Locate the peak of the integrand to shift the exponent.
  double lo = eta[0], hi = eta[0];
  for (int i = 0; i < n; ++i) {
    lo = std::min(lo, eta[i]);
    hi = std::max(hi, eta[i]);
  }
  double best_s = lo, e0 = exponent(lo);
  {
    const int grid = 64;
    const double a = lo - 2.0, b = hi + 2.0;
    for (int k = 0; k <= grid; ++k) {
      const double s = a + (b - a) * k / grid;
      const double e = exponent(s);
      if (e < e0) {
        e0 = e;
        best_s = s;
      }
    }
    double l = best_s - (b - a) / grid, r = best_s + (b - a) / grid;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 60; ++it) {
      const double m1 = r - phi * (r - l), m2 = l + phi * (r - l);
      if (exponent(m1) < exponent(m2)) r = m2; else l = m1;
    }
    const double e = exponent(0.5 * (l + r));
    if (e < e0) e0 = e;
  }
  if (!std::isfinite(e0)) throw Error(ErrorCode::NonFiniteEnergy, "effective potential exponent overflow");

  // Outside [lo - 1, hi + 1] the exponent is monotone for the built-in
  // kinds; walk out from there until the integrand is below e^-50 of its peak.
  auto reach = [&](double dir) {
    double t = std::max(1.0, dir > 0 ? hi + 1.0 - best_s : best_s - lo + 1.0);
    for (int it = 0; it < 200 && exponent(best_s + dir * t) - e0 < 50.0; ++it) t *= 1.25;
    return best_s + dir * t;
  };
  const double a = reach(-1.0), b = reach(1.0);

  const bool want_grad = grad != nullptr || hess != nullptr;
  const bool want_hess = hess != nullptr;
  const std::size_t width = 1 + (want_grad ? n : 0) + (want_hess ? n + n * (n + 1) / 2 : 0);
  std::vector<double> d1(n), out(width);
  auto f = [&](double s, double* o) {
    double e = 0.0;
    for (int i = 0; i < n; ++i) e += V.v(eta[i] - s);
    const double w = std::exp(-(beta * e - e0));
    o[0] = w;
    if (!want_grad) return;
    for (int i = 0; i < n; ++i) d1[i] = V.dv(eta[i] - s);
    for (int i = 0; i < n; ++i) o[1 + i] = w * d1[i];
    if (!want_hess) return;
    for (int i = 0; i < n; ++i) o[1 + n + i] = w * V.d2v(eta[i] - s);
    std::size_t c = 1 + 2 * static_cast<std::size_t>(n);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) o[c++] = w * d1[i] * d1[j];
    }
  };
  // Composite 20-point Gauss-Legendre, panels doubled until two levels agree.
  using Rule = boost::math::quadrature::gauss<double, 20>;
  const auto& xs = Rule::abscissa();
  const auto& ws = Rule::weights();
  auto composite = [&](std::size_t panels) {
    std::vector<double> acc(width, 0.0);
    const double h = (b - a) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
      const double mid = a + h * (static_cast<double>(p) + 0.5), half = 0.5 * h;
      for (std::size_t q = 0; q < xs.size(); ++q) {
        for (int sign : {1, -1}) {
          if (sign < 0 && xs[q] == 0.0) continue;
          f(mid + sign * half * xs[q], out.data());
          for (std::size_t k = 0; k < width; ++k) acc[k] += half * ws[q] * out[k];
        }
      }
    }
    return acc;
  };
  std::vector<double> prev = composite(4), value;
  bool converged = false;
  for (std::size_t panels = 8; panels <= 8192; panels *= 2) {
    value = composite(panels);
    const double z = std::abs(value[0]);
    converged = z > 0.0 && std::isfinite(z);
    for (std::size_t k = 0; k < width && converged; ++k) {
      converged = std::abs(value[k] - prev[k]) <= tol_ * std::max(std::abs(value[k]), z);
    }
    if (converged) break;
    prev = value;
  }
  if (!(value[0] > 0.0) || !std::isfinite(value[0])) {
    throw Error(ErrorCode::QuadratureFailure, "effective potential normalizer vanished");
  }
  if (!converged) {
    throw Error(ErrorCode::QuadratureFailure, "effective potential quadrature did not meet tol");
  }
  QuadratureResult res;
  res.value = std::move(value);
  const double Z = res.value[0];
  if (want_grad) {
    std::vector<double> m1(n);
    for (int i = 0; i < n; ++i) m1[i] = res.value[1 + i] / Z;
    if (grad) {
      for (int i = 0; i < n; ++i) grad[i] = beta * m1[i];
    }
    if (want_hess) {
      std::size_t c = 1 + 2 * static_cast<std::size_t>(n);
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
          const double cov = res.value[c++] / Z - m1[i] * m1[j];
          double h = -beta * beta * cov;
          if (i == j) h += beta * res.value[1 + n + i] / Z;
          hess[i * n + j] = hess[j * n + i] = h;
        }
      }
    }
  }
  return e0 - std::log(Z);
}

PotentialSpec effective_even_potential(const PotentialSpec& base, double beta, double tol, int dim,
                                       bool closed_form) {
  auto ev = std::make_shared<EffectiveEvenPotential>(base, beta, tol, dim, closed_form);
  PotentialSpec p;
  p.kind = PotentialKind::EffectiveEven;
  p.name = "effective_even(" + base.name + ")";
  p.beta = beta;
  p.convex = base.kind == PotentialKind::Quadratic || base.convex;
  p.stiffness = base.stiffness;
  p.effective = std::move(ev);
  if (base.kind == PotentialKind::Quadratic) {
    // Factor conductances are β k / (2d); an edge sees one or two factors.
    const double a = beta * base.stiffness / (2.0 * dim);
    p.d2v_lo = a;
    p.d2v_hi = 2.0 * a;
    p.c0 = std::max(2.0 * a, 1.0 / a);
  } else {
    p.d2v_lo = 0.0;
    p.d2v_hi = beta * base.c0;
    p.c0 = std::numeric_limits<double>::infinity();
  }
  return p;
}

}  // namespace ggl
