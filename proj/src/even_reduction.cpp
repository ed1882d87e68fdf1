#include "ggl/even_reduction.hpp"

#include <algorithm>
#include <cmath>

#include "ggl/error.hpp"
#include "ggl/quadrature.hpp"
#include "ggl/stats.hpp"

namespace ggl {

RegionSplit reduce_region(const Region& lambda, int dim) {
  if (lambda.dim() != dim) throw Error(ErrorCode::InvalidArgument, "region dimension mismatch");
  if (const auto bad = f_star_violation(lambda)) {
    throw Error(ErrorCode::NotFStar, "even vertex " + format_vertex(*bad, dim) + " has a neighbour outside Λ");
  }
  const LatticeGraph nn = LatticeGraph::nearest_neighbor(dim);
  RegionSplit s;
  s.full = lambda;
  std::vector<Vertex> even, odd;
  for (const auto& v : lambda) (is_even(v) ? even : odd).push_back(v);
  s.even = Region(dim, std::move(even));
  s.odd = Region(dim, std::move(odd));
  s.boundary = boundary(nn, lambda, BoundaryKind::Outer);
  std::vector<Vertex> eb;
  const auto steps = LatticeGraph::l1_sphere(dim, 2);
  for (const auto& x : s.even) {
    for (const auto& z : steps) {
      const Vertex y = x + z;
      if (!s.even.contains(y)) eb.push_back(y);
    }
  }
  s.even_boundary = Region(dim, std::move(eb));
  s.boundaries_agree = s.boundary == s.even_boundary;
  return s;
}

Region f_star_hull(const Region& lambda, int dim) {
  std::vector<Vertex> out(lambda.begin(), lambda.end());
  for (const auto& v : lambda) {
    if (!is_even(v)) continue;
    for (int i = 0; i < dim; ++i) {
      out.push_back(v + unit_vector(i, 1));
      out.push_back(v + unit_vector(i, -1));
    }
  }
  return Region(dim, std::move(out));
}

EvenReduction EvenReduction::build(const PotentialSpec& base, double beta, const Region& lambda, double tol,
                                   bool closed_form) {
  EvenReduction r;
  r.split = reduce_region(lambda, lambda.dim());
  r.beta = beta;
  r.effective = effective_even_potential(base, beta, tol, lambda.dim(), closed_form);
  return r;
}

EvenModel EvenReduction::model(const BoundaryCondition& bc) const { return EvenModel(effective, split.even, bc); }

namespace {

double normal_quantile_upper(double p) {
  double lo = 0.0, hi = 40.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (normal_sf(mid) > p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct Column {
  std::vector<double> x;
  double tau = 1.0;
  MeanSe m;
};

Column column(const SampleStream& s, const Vertex& v, bool independent) {
  Column c;
  c.x = s.site(v);
  if (independent) {
    c.m = mean_se(c.x);
  } else {
    const BatchMeans b = batch_means(c.x);
    c.m = {b.mean, b.se};
    c.tau = std::max(1.0, b.tau);
  }
  return c;
}

}  // namespace

MarginalReport marginal_agreement_test(const PotentialSpec& base, double beta, const Region& lambda,
                                       const std::vector<Vertex>& sites, const MarginalOptions& opts) {
  if (!base.two_body()) throw Error(ErrorCode::InvalidArgument, "the full model needs a two-body potential");
  if (sites.empty()) throw Error(ErrorCode::InvalidArgument, "no observation sites");
  const int dim = lambda.dim();
  const double even_beta = opts.even_beta.value_or(beta);
  const EvenReduction red = EvenReduction::build(base, even_beta, lambda, opts.tol);
  for (const auto& v : sites) {
    if (!red.split.even.contains(v)) throw Error(ErrorCode::InvalidArgument, "observation sites must be even sites of Λ");
  }

  MarginalReport rep;
  const bool gaussian = base.kind == PotentialKind::Quadratic;
  rep.full_method = opts.full_method.value_or(gaussian ? Method::Exact : (base.convex ? Method::HeatBath : Method::Mala));
  if (opts.even_method) {
    rep.even_method = *opts.even_method;
  } else if (gaussian) {
    rep.even_method = Method::Exact;
  } else if (check_convexity(red.effective).violations.empty()) {
    rep.even_method = Method::Mala;
  } else {
    rep.even_method = Method::Langevin;
  }
  if (rep.even_method == Method::Langevin) {
    rep.warnings.push_back("effective potential fails the convexity check; unadjusted Langevin is biased at finite dt");
  }

  SamplerOptions so;
  so.n_samples = opts.n;
  so.burn_in = opts.burn_in;
  so.thinning = opts.thinning;
  so.seed = opts.seed;

  const LatticeGraph nn = LatticeGraph::nearest_neighbor(dim);
  so.method = rep.full_method;
  so.stream = 0;
  const SampleStream full = sample_gibbs(base.with_beta(beta), nn, lambda, opts.bc, so);
  const EvenModel em = red.model(opts.bc);
  so.method = rep.even_method;
  so.stream = 1;
  const SampleStream even = sample_model(em, opts.bc, so);

  const bool full_iid = rep.full_method == Method::Exact;
  const bool even_iid = rep.even_method == Method::Exact;
  rep.alpha_per_site = opts.alpha / static_cast<double>(sites.size());
  std::vector<Column> cf, ce;
  rep.pass = true;
  for (const auto& v : sites) {
    cf.push_back(column(full, v, full_iid));
    ce.push_back(column(even, v, even_iid));
    const Column& a = cf.back();
    const Column& b = ce.back();
    SiteComparison sc;
    sc.site = v;
    sc.ks = ks_two_sample(a.x, b.x);
    sc.ess_full = static_cast<double>(a.x.size()) / a.tau;
    sc.ess_even = static_cast<double>(b.x.size()) / b.tau;
    sc.critical = ks_critical(rep.alpha_per_site, sc.ess_full, sc.ess_even);
    sc.mean_full = a.m.mean;
    sc.mean_even = b.m.mean;
    sc.var_full = sample_variance(a.x);
    sc.var_even = sample_variance(b.x);
    sc.pass = sc.ks < sc.critical;
    rep.pass = rep.pass && sc.pass;
    rep.sites.push_back(sc);
  }

  const std::size_t pairs = sites.size() * (sites.size() + 1) / 2;
  rep.moment_z_critical = normal_quantile_upper(opts.alpha / (2.0 * static_cast<double>(pairs)));
  rep.moments_pass = true;
  std::vector<double> prod;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    for (std::size_t j = i; j < sites.size(); ++j) {
      MomentComparison mc;
      mc.a = sites[i];
      mc.b = sites[j];
      auto moment = [&](const std::vector<Column>& c, bool iid, double& mean, double& se) {
        prod.resize(c[i].x.size());
        for (std::size_t k = 0; k < prod.size(); ++k) prod[k] = c[i].x[k] * c[j].x[k];
        const MeanSe m = iid ? mean_se(prod) : MeanSe{batch_means(prod).mean, batch_means(prod).se};
        mean = m.mean;
        se = m.se;
      };
      moment(cf, full_iid, mc.full, mc.full_se);
      moment(ce, even_iid, mc.even, mc.even_se);
      const double s = std::hypot(mc.full_se, mc.even_se);
      mc.z = s > 0.0 ? (mc.full - mc.even) / s : 0.0;
      if (std::abs(mc.z) > rep.moment_z_critical) rep.moments_pass = false;
      rep.moments.push_back(mc);
    }
  }
  return rep;
}

double l1_norm(const std::function<double(double)>& f, double a, double b, double tol) {
  bool ok = true;
  const double v = adaptive_simpson([&](double s) { return std::abs(f(s)); }, a, b, tol, &ok);
  if (!ok) throw Error(ErrorCode::QuadratureFailure, "L1 quadrature did not converge");
  return v;
}

double perturbation_curvature_norm(const PotentialSpec& base, double tol) {
  auto d2g = [&](double s) { return base.d2g(s); };
  switch (base.kind) {
    case PotentialKind::BumpWell: {
      if (base.bump_amplitude == 0.0) return 0.0;
      // Sign changes of g″ at ±r/√5 split the support.
      const double r = base.bump_radius, k = r / std::sqrt(5.0);
      return 2.0 * (l1_norm(d2g, 0.0, k, tol) + l1_norm(d2g, k, r, tol));
    }
    case PotentialKind::DoubleWell: {
      // |g″| ~ 2/η² beyond X; the two tails contribute 4/X + O(X⁻³).
      const double X = 1e4, k = 1.0 / std::sqrt(2.0);
      return 2.0 * (l1_norm(d2g, 0.0, k, tol) + l1_norm(d2g, k, 10.0, tol) + l1_norm(d2g, 10.0, X, tol)) + 4.0 / X;
    }
    case PotentialKind::Custom:
    case PotentialKind::EffectiveEven:
      throw Error(ErrorCode::MethodUnsupported, "no U + g split for this potential");
    default: return 0.0;
  }
}

WindowReport convexity_window(const PotentialSpec& base, const std::vector<double>& betas, const ConvexityGrid& grid,
                              double tol) {
  if (!base.two_body()) throw Error(ErrorCode::InvalidArgument, "window needs a two-body base");
  WindowReport rep;
  rep.g_norm = perturbation_curvature_norm(base);
  std::vector<double> sorted = betas;
  std::sort(sorted.begin(), sorted.end());
  bool contiguous = true;
  for (double b : sorted) {
    const PotentialSpec eff = effective_even_potential(base, b, tol, 3);
    const ConvexityReport c = check_convexity(eff, grid);
    WindowRow row;
    row.beta = b;
    row.convex = c.violations.empty();
    row.conductance_lo = c.c0_lower;
    row.conductance_hi = c.c0_upper;
    row.scaling = std::sqrt(b) * rep.g_norm;
    contiguous = contiguous && row.convex;
    if (contiguous) rep.edge = b;
    rep.rows.push_back(row);
  }
  return rep;
}

std::vector<Vertex> even_trace(const std::vector<Vertex>& path) {
  std::vector<Vertex> out;
  for (const auto& v : path) {
    if (is_even(v) && (out.empty() || out.back() != v)) out.push_back(v);
  }
  return out;
}

Vertex even_projection(const Vertex& x) { return is_even(x) ? x : x + unit_vector(0, 1); }

TightnessReport tightness_proxy(const PotentialSpec& base, double beta, const std::vector<int>& radii, std::size_t n,
                                std::uint64_t seed, int dim) {
  if (radii.size() < 3) throw Error(ErrorCode::InvalidArgument, "need at least three box sizes");
  TightnessReport rep;
  const Vertex origin{};
  for (std::size_t k = 0; k < radii.size(); ++k) {
    const Region lambda = f_star_hull(Region::cube(dim, origin, radii[k]), dim);
    const EvenReduction red = EvenReduction::build(base, beta, lambda);
    const EvenModel em = red.model(BoundaryCondition{});
    SamplerOptions so;
    so.n_samples = n;
    so.seed = seed;
    so.stream = k;
    const bool gaussian = base.kind == PotentialKind::Quadratic;
    so.method = gaussian ? Method::Exact : Method::Mala;
    const SampleStream s = sample_model(em, BoundaryCondition{}, so);
    std::vector<double> e = s.site(origin);
    for (double& v : e) v = std::exp(v);
    const MeanSe m = gaussian ? mean_se(e) : MeanSe{batch_means(e).mean, batch_means(e).se};
    rep.rows.push_back({radii[k], m.mean, m.se});
  }
  // (r[L] - r[L-1]) - (r[1] - r[0]) as a signed combination of the rows.
  const auto& r = rep.rows;
  const std::size_t L = r.size() - 1;
  std::vector<double> coef(r.size(), 0.0);
  coef[L] += 1.0;
  coef[L - 1] -= 1.0;
  coef[1] -= 1.0;
  coef[0] += 1.0;
  double diff = 0.0, var = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    diff += coef[k] * r[k].mean;
    var += coef[k] * coef[k] * r[k].se * r[k].se;
  }
  rep.bounded = diff <= 3.0 * std::sqrt(var);
  return rep;
}

}  // namespace ggl
