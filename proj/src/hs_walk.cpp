#include "ggl/hs_walk.hpp"

#include <algorithm>
#include <cmath>

#include "ggl/energy_model.hpp"
#include "ggl/error.hpp"
#include "ggl/parallel.hpp"
#include "ggl/rng.hpp"
#include "ggl/sampler.hpp"

namespace ggl {

namespace {

void require_walkable(const PotentialSpec& potential) {
  if (!potential.two_body()) throw Error(ErrorCode::MethodUnsupported, "the walk needs a two-body potential");
  if (!potential.convex || !std::isfinite(potential.c0)) {
    throw Error(ErrorCode::MethodUnsupported, "the walk needs conductances bounded in [1/c0, c0]");
  }
}

struct PairContext {
  const TwoBodyModel& model;
  const LatticeGraph& graph;
  const Region& lambda;
  const Region& target;
  double dt;
};

std::pair<WalkPath, EnvironmentTrajectory> run_pair(const PairContext& ctx, const BoundaryCondition& bc,
                                                    const Vertex& x0, const std::vector<double>& phi0,
                                                    std::uint64_t seed, std::uint64_t stream, const PairOptions& opts) {
  const TwoBodyModel& model = ctx.model;
  const Region& inner = model.region();
  const double c0 = model.potential().c0;
  const std::size_t deg = ctx.graph.degree();
  const double bound = c0 * static_cast<double>(deg);
  const double w = model.weight();
  const double dt = ctx.dt;

  WalkPath path;
  EnvironmentTrajectory env;
  env.region = inner;
  env.bc = bc;
  env.dt = dt;
  env.seed = seed;
  env.evolved = !model.constant_conductance();
  env.initial = phi0;
  if (phi0.size() != inner.size()) throw Error(ErrorCode::InvalidArgument, "initial field size mismatch");

  Rng rng(seed, stream);
  std::vector<double> phi = phi0, grad;
  const double noise = std::sqrt(2.0 * dt);

  auto step_environment = [&](double now) {
    model.gradient(phi, grad);
    for (std::size_t i = 0; i < phi.size(); ++i) {
      phi[i] += -dt * w * grad[i] + noise * rng.normal();
      if (!(std::abs(phi[i]) <= opts.guard)) {
        throw Error(ErrorCode::DivergedEnvironment, "environment height beyond guard at t = " + std::to_string(now));
      }
    }
    ++env.steps;
    if (opts.record_snapshots) {
      env.snapshot_times.push_back(now);
      env.snapshots.push_back(phi);
    }
  };

  Vertex x = x0;
  auto site = inner.index_of(x);
  double t = 0.0;
  double slab_end = dt;
  path.times.push_back(0.0);
  path.vertices.push_back(x);
  if (!(opts.horizon > 0.0)) {
    path.status = WalkStatus::Horizon;
    env.final = phi;
    return {std::move(path), std::move(env)};
  }
  while (true) {
    const double cand = t + rng.exponential(bound);
    if (cand > opts.horizon) {
      path.status = WalkStatus::Horizon;
      break;
    }
    if (env.evolved) {
      // Conductances are frozen on each slab [k dt, (k+1) dt).
      while (cand >= slab_end) {
        step_environment(slab_end);
        slab_end += dt;
      }
    }
    t = cand;
    const std::size_t k = static_cast<std::size_t>(rng.below(deg));
    const double a = model.edge_conductance(static_cast<std::size_t>(site), k, phi);
    ++path.proposals;
    if (rng.uniform() * c0 >= a) continue;
    path.min_rate = std::min(path.min_rate, a);
    path.max_rate = std::max(path.max_rate, a);
    x = x + ctx.graph.generators()[k];
    if (opts.record_path) {
      path.times.push_back(t);
      path.vertices.push_back(x);
    }
    if (ctx.target.contains(x)) {
      path.status = WalkStatus::HitTarget;
      break;
    }
    if (!ctx.lambda.contains(x)) {
      path.status = WalkStatus::ExitedDomain;
      break;
    }
    site = inner.index_of(x);
  }
  if (!opts.record_path && path.vertices.back() != x) {
    path.times.push_back(t);
    path.vertices.push_back(x);
  }
  env.final = std::move(phi);
  return {std::move(path), std::move(env)};
}

}  // namespace

std::pair<WalkPath, EnvironmentTrajectory> simulate_pair(const PotentialSpec& potential, const LatticeGraph& graph,
                                                         const Region& lambda, const Region& target,
                                                         const BoundaryCondition& bc, const Vertex& x0,
                                                         const std::vector<double>& phi0, std::uint64_t seed,
                                                         std::uint64_t stream, const PairOptions& opts) {
  require_walkable(potential);
  if (!lambda.contains(x0) || target.contains(x0)) {
    throw Error(ErrorCode::InvalidArgument, "x0 must lie in Λ \\ S′");
  }
  const Region inner = lambda.minus(target);
  TwoBodyModel model(potential, graph, inner, bc);
  const double dt = opts.dt > 0.0 ? opts.dt : default_dt(model);
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  PairContext ctx{model, graph, lambda, target, dt};
  return run_pair(ctx, bc, x0, phi0, seed, stream, opts);
}

HitEstimate hit_before_exit(const PotentialSpec& potential, const LatticeGraph& graph, const Region& lambda,
                            const Region& target, const BoundaryCondition& bc, const Vertex& x0, std::size_t n_reps,
                            std::uint64_t seed, const HitOptions& opts) {
  require_walkable(potential);
  if (!lambda.contains(x0) || target.contains(x0)) {
    throw Error(ErrorCode::InvalidArgument, "x0 must lie in Λ \\ S′");
  }
  if (!target.subset_of(lambda)) throw Error(ErrorCode::InvalidArgument, "S′ must lie inside Λ");
  HitEstimate est;
  est.reps = n_reps;
  if (n_reps == 0) throw Error(ErrorCode::TooFewSamples, "no replicates requested");
  if (target.empty()) {
    est.indicators.assign(n_reps, 0);
    return est;
  }
  const Region inner = lambda.minus(target);
  TwoBodyModel model(potential, graph, inner, bc);
  const double dt = opts.dt > 0.0 ? opts.dt : default_dt(model);
  PairContext ctx{model, graph, lambda, target, dt};
  PairOptions popts;
  popts.dt = dt;
  popts.record_path = false;

  const bool needs_field = !model.constant_conductance();
  std::optional<Chain> chain;
  std::vector<double> fixed(inner.size(), bc.constant);
  if (opts.init == InitPolicy::Given) {
    if (opts.given.size() != inner.size()) throw Error(ErrorCode::InvalidArgument, "given field size mismatch");
    fixed = opts.given;
  } else if (needs_field) {
    chain.emplace(model, Method::HeatBath, std::vector<double>(inner.size(), bc.constant), seed, 0, default_dt(model),
                  1e6);
    const std::size_t burn = opts.burn_in ? *opts.burn_in : default_burn_in(inner);
    for (std::size_t s = 0; s < burn; ++s) chain->sweep();
  }

  est.indicators.assign(n_reps, 0);
  std::vector<double> lo(n_reps, std::numeric_limits<double>::infinity());
  std::vector<double> hi(n_reps, -std::numeric_limits<double>::infinity());
  const std::size_t block = 256;
  const std::size_t workers = resolve_workers(opts.workers);
  std::vector<std::vector<double>> fields;
  for (std::size_t start = 0; start < n_reps; start += block) {
    const std::size_t len = std::min(block, n_reps - start);
    fields.assign(len, {});
    if (chain) {
      for (std::size_t r = 0; r < len; ++r) {
        for (std::size_t s = 0; s < std::max<std::size_t>(1, opts.thinning); ++s) chain->sweep();
        fields[r] = chain->phi();
      }
    }
    parallel_for(len, workers, [&](std::size_t r) {
      const std::size_t rep = start + r;
      const auto& phi0 = chain ? fields[r] : fixed;
      const auto res = run_pair(ctx, bc, x0, phi0, seed, rep + 1, popts);
      est.indicators[rep] = res.first.status == WalkStatus::HitTarget ? 1 : 0;
      lo[rep] = res.first.min_rate;
      hi[rep] = res.first.max_rate;
    });
  }
  for (std::size_t r = 0; r < n_reps; ++r) {
    est.hits += est.indicators[r];
    est.min_rate = std::min(est.min_rate, lo[r]);
    est.max_rate = std::max(est.max_rate, hi[r]);
  }
  const MeanSe m = proportion(est.hits, n_reps);
  est.p = m.mean;
  est.se = m.se;
  return est;
}

double cross_section_w(double p) {
  if (!(p >= 0.0)) throw Error(ErrorCode::InvalidArgument, "probability must be nonnegative");
  if (p >= 1.0 - 1e-9) throw Error(ErrorCode::DegenerateW, "hitting probability " + std::to_string(p) + " too close to 1");
  return p / (1.0 - p);
}

CrossSectionResult cross_section(const PotentialSpec& potential, const LatticeGraph& graph, const Region& S,
                                 const Region& target, const Region& lambda, std::size_t n_paths, std::uint64_t seed,
                                 const CrossSectionOptions& opts) {
  require_walkable(potential);
  if (!S.disjoint_from(target)) throw Error(ErrorCode::InvalidArgument, "S and S′ must be disjoint");
  if (!S.subset_of(lambda) || !target.subset_of(lambda)) {
    throw Error(ErrorCode::InvalidArgument, "S and S′ must lie inside Λ");
  }
  CrossSectionResult res;
  if (target.empty() || S.empty()) return res;

  const Region inner = lambda.minus(target);
  const bool constant = potential.kind == PotentialKind::Quadratic;
  const std::size_t n_env = constant ? 1 : std::max<std::size_t>(1, opts.n_env);

  std::size_t best = 0;
  std::vector<std::uint8_t> best_ind;
  std::uint64_t cell = 0;
  for (std::size_t b = 0; b < opts.bc_values.size(); ++b) {
    BoundaryCondition bc;
    bc.constant = opts.bc_values[b];
    std::vector<std::vector<double>> envs(n_env, std::vector<double>(inner.size(), bc.constant));
    if (!constant) {
      TwoBodyModel model(potential, graph, inner, bc);
      Chain chain(model, Method::HeatBath, std::vector<double>(inner.size(), bc.constant), seed,
                  1'000'000 + b, default_dt(model), 1e6);
      for (std::size_t s = 0; s < default_burn_in(inner); ++s) chain.sweep();
      for (std::size_t e = 0; e < n_env; ++e) {
        for (std::size_t s = 0; s < 10; ++s) chain.sweep();
        envs[e] = chain.phi();
      }
    }
    for (std::size_t e = 0; e < n_env; ++e) {
      for (const auto& x : S) {
        HitOptions hopts;
        hopts.init = InitPolicy::Given;
        hopts.given = envs[e];
        hopts.dt = opts.dt;
        hopts.workers = opts.workers;
        // Distinct cells use disjoint seeds so their walks are independent.
        const HitEstimate h = hit_before_exit(potential, graph, lambda, target, bc, x, n_paths, seed + 7919 * (++cell), hopts);
        CrossSectionRow row{x, bc.constant, e, h.p, h.se, cross_section_w(h.p)};
        if (res.rows.empty() || row.w > res.rows[best].w) {
          best = res.rows.size();
          best_ind = h.indicators;
        }
        res.rows.push_back(row);
      }
    }
  }
  res.sigma = res.rows[best].w;
  Rng rng(seed, 2'000'000);
  res.ci = bootstrap_ci(
      best_ind.size(),
      [&](const std::vector<std::size_t>& idx) {
        double s = 0.0;
        for (auto i : idx) s += best_ind[i];
        const double p = std::min(s / static_cast<double>(idx.size()), 1.0 - 1e-9);
        return p / (1.0 - p);
      },
      opts.bootstrap, 0.95, rng);
  for (const auto& x : S) {
    res.sigma_srw = std::max(res.sigma_srw, cross_section_w(hitting(graph, x, target, lambda).p));
  }
  return res;
}

SrwComparison compare_to_srw(const PotentialSpec& potential, const LatticeGraph& graph, const Vertex& x,
                             const Region& U, const Region& lambda, std::size_t n, std::uint64_t seed, double K,
                             const HitOptions& opts) {
  if (U.contains(x)) throw Error(ErrorCode::InvalidArgument, "x must lie outside U");
  SrwComparison c;
  const HitEstimate h = hit_before_exit(potential, graph, lambda, U, BoundaryCondition{}, x, n, seed, opts);
  c.p_env = h.p;
  c.se_env = h.se;
  c.p_srw = hitting(graph, x, U, lambda).p;
  c.ratio = c.p_srw > 0.0 ? c.p_env / c.p_srw : 0.0;
  c.sigma_x = U.size() == 1 ? 1.0 : sigma_ratio(graph, x, U);
  c.lower = 1.0 / (K * c.sigma_x);
  c.upper = K * c.sigma_x;
  c.within = c.ratio >= c.lower && c.ratio <= c.upper;
  return c;
}

}  // namespace ggl
