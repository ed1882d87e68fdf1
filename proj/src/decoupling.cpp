#include "ggl/decoupling.hpp"

#include <cmath>
#include <limits>

#include "ggl/error.hpp"

namespace ggl {

void ConstantsConfig::validate() const {
  const double all[] = {c0, c1, c2, c14, c15, c21, c24, K_decouple, K};
  for (double v : all) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorCode::ConfigError, "constants must be positive and finite");
  }
}

double error_term_formula(double c1, double c2, double size_S, double inner_boundary, double cap, double sigma,
                          double eps, double Sigma) {
  if (!(eps > 0.0) || !(Sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "ε and Σ must be positive");
  const double q = cap / (sigma * sigma * inner_boundary) * (eps / Sigma);
  return c1 * size_S * std::exp(inner_boundary - c2 * q * q);
}

ErrorTermInputs error_term_inputs(const LatticeGraph& graph, const Region& S, const Region& target,
                                  const Infinite& opts) {
  if (!S.disjoint_from(target)) throw Error(ErrorCode::InvalidArgument, "S and S′ must be disjoint");
  ErrorTermInputs in;
  in.size_S = static_cast<double>(S.size());
  in.inner_boundary = static_cast<double>(boundary(graph, target, BoundaryKind::Inner).size());
  in.cap = capacity_infinite(graph, target, opts).cap;
  in.sigma = sigma_ratio(graph, S, target, opts);
  return in;
}

double error_term(const ConstantsConfig& constants, const ErrorTermInputs& in, double eps, double Sigma) {
  return error_term_formula(constants.c1, constants.c2, in.size_S, in.inner_boundary, in.cap, in.sigma, eps, Sigma);
}

double error_term(const ConstantsConfig& constants, const LatticeGraph& graph, const Region& S, const Region& target,
                  double eps, double Sigma) {
  return error_term(constants, error_term_inputs(graph, S, target), eps, Sigma);
}

double sprinkling_threshold(double eps, double Sigma) {
  if (!(eps > 0.0) || !(Sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "ε and Σ must be positive");
  return eps * (1.0 / Sigma + 1.0);
}

Observable Observable::indicator(MonotoneEvent e, double level) {
  Observable o;
  o.kind = Kind::Indicator;
  o.event = std::move(e);
  o.level = level;
  return o;
}

Observable Observable::clipped_sum(std::vector<Vertex> sites, std::vector<double> weights, double cap) {
  if (sites.size() != weights.size()) throw Error(ErrorCode::InvalidArgument, "one weight per site");
  for (double w : weights) {
    if (!(w >= 0.0)) throw Error(ErrorCode::InvalidArgument, "weights must be nonnegative");
  }
  if (!(cap > 0.0)) throw Error(ErrorCode::InvalidArgument, "cap must be positive");
  Observable o;
  o.kind = Kind::ClippedSum;
  o.sites = std::move(sites);
  o.weights = std::move(weights);
  o.cap = cap;
  return o;
}

Region Observable::support() const {
  if (kind == Kind::Indicator) return event.support();
  return Region(3, sites);
}

double srw_cross_section(const LatticeGraph& graph, const Region& S, const Region& target, const Region& lambda) {
  double best = 0.0;
  for (const auto& x : S) {
    const double p = hitting(graph, x, target, lambda).p;
    if (p >= 1.0 - 1e-9) throw Error(ErrorCode::DegenerateW, "hitting probability too close to 1");
    best = std::max(best, p / (1.0 - p));
  }
  return best;
}

namespace {

double combine(double a, double b) { return std::sqrt(a * a + b * b); }

}  // namespace

std::vector<DecouplingReport> decoupling_experiment(const FieldSource& source, const LatticeGraph& graph,
                                                    const Region& lambda, const Region& S, const Region& target,
                                                    const MonotoneEvent& A, const Observable& f, double h,
                                                    const std::vector<double>& eps_grid, std::size_t n,
                                                    std::uint64_t seed, const DecouplingOptions& opts) {
  opts.constants.validate();
  if (!S.disjoint_from(target)) throw Error(ErrorCode::InvalidArgument, "S and S′ must be disjoint");
  if (!S.subset_of(lambda) || !target.subset_of(lambda)) {
    throw Error(ErrorCode::InvalidArgument, "S and S′ must lie inside Λ");
  }
  if (!A.support().subset_of(S)) throw Error(ErrorCode::SupportOutsideRegion, "event support must lie in S");
  if (!f.support().subset_of(target)) throw Error(ErrorCode::SupportOutsideRegion, "f must depend on S′ only");

  const CompiledEvent a_ev(A, source.sites);
  std::optional<CompiledEvent> f_ev;
  std::vector<std::int32_t> f_idx;
  if (f.kind == Observable::Kind::Indicator) {
    f_ev.emplace(f.event, source.sites);
  } else {
    for (const auto& v : f.sites) {
      const auto i = source.sites.index_of(v);
      if (i < 0) throw Error(ErrorCode::SupportOutsideRegion, "f site outside the sampled sites");
      f_idx.push_back(static_cast<std::int32_t>(i));
    }
  }

  const ErrorTermInputs inputs = opts.inputs ? *opts.inputs : error_term_inputs(graph, S, target);
  const double sigma = opts.sigma ? *opts.sigma : srw_cross_section(graph, S, target, lambda);

  const SampleStream stream = source.draw(n, seed);
  std::vector<double> level(n), fv(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = stream.row(i);
    level[i] = a_ev.critical_level(row);
    if (f_ev) {
      fv[i] = f_ev->evaluate(row, f.level) ? 1.0 : 0.0;
    } else {
      double s = 0.0;
      for (std::size_t k = 0; k < f_idx.size(); ++k) s += f.weights[k] * row[static_cast<std::size_t>(f_idx[k])];
      fv[i] = std::min(f.cap, std::max(0.0, s));
    }
  }
  auto est = [&](const std::vector<double>& v) {
    const MeanSe m = estimate_mean(v, source.independent);
    return Estimated{m.mean, m.se};
  };
  std::vector<double> ind(n), prod(n);
  for (std::size_t i = 0; i < n; ++i) {
    ind[i] = level[i] >= h ? 1.0 : 0.0;
    prod[i] = ind[i] * fv[i];
  }
  const Estimated lhs = est(prod), mu_h = est(ind), ef = est(fv);

  std::vector<DecouplingReport> out;
  for (double eps : eps_grid) {
    DecouplingReport r;
    r.h = h;
    r.eps = eps;
    r.n = n;
    r.inputs = inputs;
    r.lhs = lhs;
    r.mu_A_h = mu_h;
    r.mean_f = ef;
    std::vector<double> sp(n);
    for (std::size_t i = 0; i < n; ++i) sp[i] = level[i] >= h - eps ? 1.0 : 0.0;
    r.mu_A_sprinkled = est(sp);
    r.sigma_hat = sigma;
    if (sigma > 0.0) {
      r.delta = error_term(opts.constants, inputs, eps, sigma);
      r.M = sprinkling_threshold(eps, sigma);
    } else {
      r.delta = 0.0;  // S′ invisible from S: no correction
      r.M = std::numeric_limits<double>::infinity();
    }
    r.upper = r.mu_A_sprinkled.value * ef.value + r.delta * f.sup_norm();
    r.upper_se = combine(ef.value * r.mu_A_sprinkled.se, r.mu_A_sprinkled.value * ef.se);
    r.upper_ok = lhs.value <= r.upper + 3.0 * combine(lhs.se, r.upper_se);
    r.has_lower = f.increasing();
    if (r.has_lower) {
      r.lower = mu_h.value * ef.value;
      r.lower_se = combine(ef.value * mu_h.se, mu_h.value * ef.se);
      r.lower_ok = lhs.value >= r.lower - 3.0 * combine(lhs.se, r.lower_se);
    } else {
      r.lower_ok = true;
    }
    r.pass = r.upper_ok && r.lower_ok;
    out.push_back(r);
  }
  return out;
}

DecouplingReport decoupling_experiment(const FieldSource& source, const LatticeGraph& graph, const Region& lambda,
                                       const Region& S, const Region& target, const MonotoneEvent& A,
                                       const Observable& f, double h, double eps, std::size_t n, std::uint64_t seed,
                                       const DecouplingOptions& opts) {
  return decoupling_experiment(source, graph, lambda, S, target, A, f, h, std::vector<double>{eps}, n, seed, opts)
      .front();
}

BrascampLiebReport brascamp_lieb_check(const PotentialSpec& potential, const LatticeGraph& graph,
                                       const Region& lambda, const DiscreteMeasure& nu, const FieldSource& source,
                                       std::size_t n, std::uint64_t seed) {
  if (!potential.two_body() || !potential.convex) {
    throw Error(ErrorCode::MethodUnsupported, "Brascamp–Lieb needs a uniformly convex potential");
  }
  BrascampLiebReport rep;
  if (nu.support.empty() || nu.mass() == 0.0) {
    rep.lhs = {1.0, 0.0};
    rep.rhs = 1.0;
    rep.pass = true;
    return rep;
  }
  if (!nu.support.subset_of(lambda)) throw Error(ErrorCode::SupportOutsideRegion, "ν must live on Λ");

  GreenOperator G(graph, lambda);
  double quad = 0.0;
  for (std::size_t j = 0; j < nu.support.size(); ++j) {
    const auto col = G.column(nu.support[j]);
    for (std::size_t i = 0; i < nu.support.size(); ++i) {
      quad += nu.weights[i] * nu.weights[j] * col[static_cast<std::size_t>(lambda.index_of(nu.support[i]))];
    }
  }
  rep.variance_bound = potential.c0 * quad / (potential.beta * static_cast<double>(graph.degree()));
  rep.rhs = std::exp(0.5 * rep.variance_bound);

  std::vector<std::size_t> idx;
  for (const auto& v : nu.support) {
    const auto i = source.sites.index_of(v);
    if (i < 0) throw Error(ErrorCode::SupportOutsideRegion, "ν outside the sampled sites");
    idx.push_back(static_cast<std::size_t>(i));
  }
  const SampleStream stream = source.draw(n, seed);
  std::vector<double> x(n);
  for (std::size_t s = 0; s < n; ++s) {
    const auto row = stream.row(s);
    double v = 0.0;
    for (std::size_t k = 0; k < idx.size(); ++k) v += nu.weights[k] * row[idx[k]];
    x[s] = v;
  }
  // Even potentials with constant boundary value c have Eφ_x = c by the
  // reflection φ - c ↦ c - φ; otherwise centre empirically.
  double centre;
  const bool symmetric = potential.kind != PotentialKind::Custom && source.bc.values.empty();
  if (symmetric) {
    centre = source.bc.constant * nu.mass();
  } else {
    centre = 0.0;
    for (double v : x) centre += v;
    centre /= static_cast<double>(n);
  }
  std::vector<double> e(n);
  for (std::size_t s = 0; s < n; ++s) e[s] = std::exp(x[s] - centre);
  const MeanSe m = estimate_mean(e, source.independent);
  rep.lhs = {m.mean, m.se};
  rep.z = m.se > 0.0 ? (m.mean - rep.rhs) / m.se : 0.0;
  rep.pass = m.mean <= rep.rhs * (1.0 + 3.0 * m.se / m.mean);
  return rep;
}

}  // namespace ggl
