#include "ggl/sampler.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "ggl/error.hpp"
#include "ggl/green.hpp"
#include "ggl/linalg.hpp"
#include "ggl/parallel.hpp"

namespace ggl {

std::size_t resolve_workers(std::size_t requested) {
  if (const char* env = std::getenv("GGL_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string to_string(Method m) {
  switch (m) {
    case Method::HeatBath: return "heatbath";
    case Method::Mala: return "mala";
    case Method::Langevin: return "langevin";
    case Method::Exact: return "exact";
  }
  return "unknown";
}

Method method_from_string(const std::string& s) {
  if (s == "heatbath") return Method::HeatBath;
  if (s == "mala") return Method::Mala;
  if (s == "langevin") return Method::Langevin;
  if (s == "exact") return Method::Exact;
  throw Error(ErrorCode::ConfigError, "unknown sampling method '" + s + "'");
}

FieldConfig SampleStream::field(std::size_t i) const {
  auto r = row(i);
  return FieldConfig(region, std::vector<double>(r.begin(), r.end()), bc);
}

std::vector<double> SampleStream::site(const Vertex& x) const {
  const auto j = region.index_of(x);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = j >= 0 ? data[i * region.size() + static_cast<std::size_t>(j)] : bc.value(x);
  return out;
}

void SampleStream::append(const std::vector<double>& phi) {
  data.insert(data.end(), phi.begin(), phi.end());
  ++n;
}

// ---------------------------------------------------------------------------

Chain::Chain(const EnergyModel& model, Method method, std::vector<double> init, std::uint64_t seed,
             std::uint64_t stream, double dt, double guard)
    : model_(model), method_(method), rng_(seed, stream), guard_(guard) {
  state_.phi = std::move(init);
  state_.dt = dt;
  if (state_.phi.size() != model_.size()) throw Error(ErrorCode::InvalidArgument, "initial field size mismatch");
  if (method_ == Method::HeatBath) {
    for (std::size_t i = 0; i < model_.size(); ++i) {
      if (!model_.curvature_lower(i) || !(*model_.curvature_lower(i) > 0.0)) {
        throw Error(ErrorCode::MethodUnsupported, "heat-bath needs single-site log-concavity");
      }
    }
  }
  if ((method_ == Method::Mala || method_ == Method::Langevin) && !(state_.dt > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  }
  if (method_ == Method::Exact) throw Error(ErrorCode::InvalidArgument, "exact sampling has no chain");
}

Chain::Chain(const EnergyModel& model, Method method, ChainState state, double guard)
    : Chain(model, method, state.phi, 0, 0, state.dt, guard) {
  rng_ = Rng(state.rng);
  state_ = std::move(state);
}

const ChainState& Chain::state() const {
  state_.rng = rng_.state();
  return state_;
}

double Chain::acceptance() const {
  return state_.proposed == 0 ? 1.0 : static_cast<double>(state_.accepted) / static_cast<double>(state_.proposed);
}

void Chain::check_guard() const {
  for (double v : state_.phi) {
    if (!(std::abs(v) <= guard_)) {
      throw Error(ErrorCode::DivergedChain, "height " + std::to_string(v) + " beyond guard");
    }
  }
}

void Chain::heat_bath_site(std::size_t i) {
  auto& phi = state_.phi;
  const double w = model_.weight();
  const double kappa = *model_.curvature_lower(i);
  // Approximate mode by safeguarded Newton; exactness does not depend on it.
  double t = phi[i];
  LocalEnergy le = model_.local(i, t, phi);
  for (int it = 0; it < 50; ++it) {
    const double step = le.de / std::max(le.d2e, kappa);
    t -= step;
    le = model_.local(i, t, phi);
    if (std::abs(step) <= 1e-12 * (1.0 + std::abs(t))) break;
  }
  // q(s) = E(t) + E'(t)(s - t) + κ(s - t)²/2 lies below E, so exp(-w q)
  // envelopes the conditional density.
  const double center = t - le.de / kappa;
  const double sd = 1.0 / std::sqrt(w * kappa);
  for (int attempt = 0; attempt < 1'000'000; ++attempt) {
    const double s = center + sd * rng_.normal();
    const double ds = s - t;
    const double q = le.e + le.de * ds + 0.5 * kappa * ds * ds;
    const double e = model_.local_value(i, s, phi);
    ++state_.proposed;
    if (rng_.uniform() < std::exp(-w * (e - q))) {
      ++state_.accepted;
      phi[i] = s;
      return;
    }
  }
  throw Error(ErrorCode::DivergedChain, "heat-bath rejection loop did not terminate");
}

void Chain::mala_step(bool metropolis) {
  auto& phi = state_.phi;
  const std::size_t n = phi.size();
  const double w = model_.weight();
  const double dt = state_.dt;
  if (!energy_valid_) {
    energy_ = model_.energy_and_gradient(phi, grad_);
    energy_valid_ = true;
  }
  prop_.resize(n);
  const double noise = std::sqrt(2.0 * dt);
  for (std::size_t i = 0; i < n; ++i) prop_[i] = phi[i] - dt * w * grad_[i] + noise * rng_.normal();
  const double e_new = model_.energy_and_gradient(prop_, prop_grad_);
  ++state_.proposed;
  ++window_prop_;
  bool accept = true;
  if (metropolis) {
    double fwd = 0.0, bwd = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = prop_[i] - phi[i] + dt * w * grad_[i];
      const double b = phi[i] - prop_[i] + dt * w * prop_grad_[i];
      fwd += a * a;
      bwd += b * b;
    }
    const double log_alpha = -w * (e_new - energy_) - bwd / (4.0 * dt) + fwd / (4.0 * dt);
    accept = std::isfinite(e_new) && std::log(1.0 - rng_.uniform()) < log_alpha;
  }
  if (accept) {
    phi.swap(prop_);
    grad_.swap(prop_grad_);
    energy_ = e_new;
    ++state_.accepted;
    ++window_acc_;
  }
}

void Chain::sweep() {
  switch (method_) {
    case Method::HeatBath:
      for (std::size_t i = 0; i < state_.phi.size(); ++i) heat_bath_site(i);
      break;
    case Method::Mala: mala_step(true); break;
    case Method::Langevin: mala_step(false); break;
    case Method::Exact: break;
  }
  ++state_.step_count;
  check_guard();
}

void Chain::tune(double target) {
  if (method_ != Method::Mala || window_prop_ == 0) return;
  const double rate = static_cast<double>(window_acc_) / static_cast<double>(window_prop_);
  state_.dt *= std::exp(rate - target);
  window_acc_ = window_prop_ = 0;
}

double default_dt(const EnergyModel& model) {
  double hi = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) hi = std::max(hi, model.curvature_upper(i));
  if (!(hi > 0.0)) hi = 1.0;
  // 0.5/(β c0 2|Γ|) with the site curvature bound standing in for c0 |Γ|.
  return 0.25 / (model.weight() * hi);
}

std::size_t default_burn_in(const Region& region) {
  if (region.empty()) return 0;
  int diam = 0;
  for (int i = 0; i < region.dim(); ++i) {
    int lo = region[0][i], hi = region[0][i];
    for (const auto& v : region) {
      lo = std::min(lo, v[i]);
      hi = std::max(hi, v[i]);
    }
    diam += hi - lo;
  }
  return 10 * static_cast<std::size_t>(diam) * static_cast<std::size_t>(diam);
}

namespace {

SampleStream exact_stream(const GaussianField& gf, const Region& region, const BoundaryCondition& bc,
                          const SamplerOptions& opts) {
  SampleStream s;
  s.region = region;
  s.bc = bc;
  s.method = Method::Exact;
  s.seed = opts.seed;
  Rng rng(opts.seed, opts.stream);
  std::vector<double> x;
  s.data.reserve(opts.n_samples * region.size());
  for (std::size_t k = 0; k < opts.n_samples; ++k) {
    gf.sample(rng, x);
    s.append(x);
  }
  return s;
}

}  // namespace

SampleStream sample_model(const EnergyModel& model, const BoundaryCondition& bc, const SamplerOptions& opts) {
  if (opts.method == Method::Exact) {
    if (const auto* tb = dynamic_cast<const TwoBodyModel*>(&model)) {
      if (tb->potential().kind != PotentialKind::Quadratic) {
        throw Error(ErrorCode::MethodUnsupported, "exact sampling needs a quadratic potential");
      }
      GaussianField gf = dirichlet_gaussian(tb->graph(), model.region(), bc, tb->potential().stiffness,
                                            tb->potential().beta);
      return exact_stream(gf, model.region(), bc, opts);
    }
    const auto& em = dynamic_cast<const EvenModel&>(model);
    GaussianField gf(model.size(), em.quadratic_hessian(), em.quadratic_linear_term());
    return exact_stream(gf, model.region(), bc, opts);
  }
  if (opts.thinning == 0) throw Error(ErrorCode::InvalidArgument, "thinning must be >= 1");
  std::vector<double> init = opts.init ? *opts.init : std::vector<double>(model.size(), bc.constant);
  const double dt = opts.dt > 0.0 ? opts.dt : default_dt(model);
  Chain chain(model, opts.method, std::move(init), opts.seed, opts.stream, dt, opts.guard);
  const std::size_t burn = opts.burn_in ? *opts.burn_in : default_burn_in(model.region());
  for (std::size_t s = 0; s < burn; ++s) {
    chain.sweep();
    if (opts.tune_dt && (s + 1) % 50 == 0) chain.tune(opts.target_acceptance);
  }
  SampleStream out;
  out.region = model.region();
  out.bc = bc;
  out.method = opts.method;
  out.burn_in = burn;
  out.thinning = opts.thinning;
  out.seed = opts.seed;
  out.dt = chain.dt();
  out.data.reserve(opts.n_samples * model.size());
  const ChainState before = chain.state();
  for (std::size_t k = 0; k < opts.n_samples; ++k) {
    for (std::size_t t = 0; t < opts.thinning; ++t) chain.sweep();
    out.append(chain.phi());
  }
  const ChainState& after = chain.state();
  const auto prop = after.proposed - before.proposed;
  out.acceptance = prop == 0 ? 1.0 : static_cast<double>(after.accepted - before.accepted) / static_cast<double>(prop);
  return out;
}

SampleStream sample_gibbs(const PotentialSpec& potential, const LatticeGraph& graph, const Region& region,
                          const BoundaryCondition& bc, const SamplerOptions& opts) {
  if (opts.method == Method::HeatBath && potential.two_body() && !potential.convex) {
    throw Error(ErrorCode::MethodUnsupported, "heat-bath requested for a nonconvex potential");
  }
  auto model = make_energy_model(potential, graph, region, bc);
  return sample_model(*model, bc, opts);
}

// ---------------------------------------------------------------------------

struct GaussianField::Impl {
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt;
};

GaussianField::GaussianField(std::size_t n, const std::vector<std::tuple<int, int, double>>& precision,
                             const std::vector<double>& linear)
    : impl_(std::make_unique<Impl>()), n_(n) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(precision.size());
  for (const auto& [i, j, v] : precision) trips.emplace_back(i, j, v);
  Eigen::SparseMatrix<double> Q(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  Q.setFromTriplets(trips.begin(), trips.end());
  impl_->llt.compute(Q);
  if (impl_->llt.info() != Eigen::Success) throw Error(ErrorCode::SolverFailure, "precision not positive definite");
  Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(linear.data(), static_cast<Eigen::Index>(n));
  Eigen::VectorXd m = impl_->llt.solve(b);
  mean_.assign(m.data(), m.data() + n);
}

GaussianField::~GaussianField() = default;
GaussianField::GaussianField(GaussianField&&) noexcept = default;
GaussianField& GaussianField::operator=(GaussianField&&) noexcept = default;

void GaussianField::sample(Rng& rng, std::vector<double>& out) const {
  Eigen::VectorXd z(static_cast<Eigen::Index>(n_));
  for (std::size_t i = 0; i < n_; ++i) z(static_cast<Eigen::Index>(i)) = rng.normal();
  // P Q Pᵀ = L Lᵀ, so Pᵀ L⁻ᵀ z has covariance Q⁻¹.
  Eigen::VectorXd y = impl_->llt.matrixU().solve(z);
  Eigen::VectorXd x = impl_->llt.permutationPinv() * y;
  out.resize(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = mean_[i] + x(static_cast<Eigen::Index>(i));
}

GaussianField dirichlet_gaussian(const LatticeGraph& graph, const Region& region, const BoundaryCondition& bc,
                                 double stiffness, double beta) {
  const double bk = beta * stiffness;
  std::vector<std::tuple<int, int, double>> trips;
  std::vector<double> b(region.size(), 0.0);
  for (std::size_t i = 0; i < region.size(); ++i) {
    trips.emplace_back(static_cast<int>(i), static_cast<int>(i), bk * static_cast<double>(graph.degree()));
    for (const auto& g : graph.generators()) {
      const Vertex y = region[i] + g;
      const auto j = region.index_of(y);
      if (j >= 0) {
        trips.emplace_back(static_cast<int>(i), static_cast<int>(j), -bk);
      } else {
        b[i] += bk * bc.value(y);
      }
    }
  }
  return GaussianField(region.size(), trips, b);
}

SampleStream gaussian_exact_sample(const LatticeGraph& graph, const Region& region, const BoundaryCondition& bc,
                                   double stiffness, std::size_t n, std::uint64_t seed, double beta,
                                   std::size_t max_sites) {
  if (region.size() > max_sites) {
    throw Error(ErrorCode::RegionTooLarge,
                std::to_string(region.size()) + " sites exceed the factorization guard of " + std::to_string(max_sites));
  }
  GaussianField gf = dirichlet_gaussian(graph, region, bc, stiffness, beta);
  SamplerOptions opts;
  opts.method = Method::Exact;
  opts.n_samples = n;
  opts.seed = seed;
  return exact_stream(gf, region, bc, opts);
}

// ---------------------------------------------------------------------------

struct GaussianMarginal::Impl {
  Eigen::MatrixXd cov;
  Eigen::MatrixXd chol;
  std::vector<std::ptrdiff_t> free_index;  // site -> row in cov, or -1 if fixed
  std::vector<double> fixed_value;
};

GaussianMarginal::GaussianMarginal(const LatticeGraph& graph, const Region& region, const BoundaryCondition& bc,
                                   double stiffness, double beta, Region sites)
    : impl_(std::make_unique<Impl>()), sites_(std::move(sites)) {
  const double scale = 1.0 / (beta * stiffness * static_cast<double>(graph.degree()));
  std::vector<std::size_t> free_sites;
  impl_->free_index.assign(sites_.size(), -1);
  impl_->fixed_value.assign(sites_.size(), 0.0);
  for (std::size_t s = 0; s < sites_.size(); ++s) {
    if (region.contains(sites_[s])) {
      impl_->free_index[s] = static_cast<std::ptrdiff_t>(free_sites.size());
      free_sites.push_back(s);
    } else {
      impl_->fixed_value[s] = bc.value(sites_[s]);
    }
  }
  GreenOperator G(graph, region);
  const std::size_t m = free_sites.size();
  std::vector<std::vector<double>> cols(m);
  parallel_for(m, resolve_workers(0), [&](std::size_t k) {
    const std::vector<double> col = G.column(sites_[free_sites[k]]);
    cols[k].resize(m);
    for (std::size_t l = 0; l < m; ++l) {
      cols[k][l] = col[static_cast<std::size_t>(region.index_of(sites_[free_sites[l]]))] * scale;
    }
  });
  impl_->cov.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t l = 0; l < m; ++l) {
      impl_->cov(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k)) = 0.5 * (cols[k][l] + cols[l][k]);
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(impl_->cov);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::SolverFailure, "marginal covariance not positive definite");
  impl_->chol = llt.matrixL();

  // Mean: the harmonic extension solves (I - P) m = P ξ.
  std::vector<double> rhs(region.size(), 0.0);
  bool any = false;
  const double w = 1.0 / static_cast<double>(graph.degree());
  for (std::size_t i = 0; i < region.size(); ++i) {
    for (const auto& g : graph.generators()) {
      const Vertex y = region[i] + g;
      if (!region.contains(y)) {
        rhs[i] += w * bc.value(y);
        any = any || bc.value(y) != 0.0;
      }
    }
  }
  std::vector<double> full_mean(region.size(), 0.0);
  if (any) full_mean = G.solve(rhs);
  mean_.assign(sites_.size(), 0.0);
  for (std::size_t s = 0; s < sites_.size(); ++s) {
    mean_[s] = impl_->free_index[s] >= 0 ? full_mean[static_cast<std::size_t>(region.index_of(sites_[s]))]
                                         : impl_->fixed_value[s];
  }
}

GaussianMarginal::~GaussianMarginal() = default;
GaussianMarginal::GaussianMarginal(GaussianMarginal&&) noexcept = default;
GaussianMarginal& GaussianMarginal::operator=(GaussianMarginal&&) noexcept = default;

double GaussianMarginal::covariance(std::size_t i, std::size_t j) const {
  const auto a = impl_->free_index[i], b = impl_->free_index[j];
  if (a < 0 || b < 0) return 0.0;
  return impl_->cov(a, b);
}

void GaussianMarginal::sample(Rng& rng, std::vector<double>& out) const {
  const Eigen::Index m = impl_->chol.rows();
  Eigen::VectorXd z(m);
  for (Eigen::Index i = 0; i < m; ++i) z(i) = rng.normal();
  const Eigen::VectorXd x = impl_->chol.triangularView<Eigen::Lower>() * z;
  out.resize(sites_.size());
  for (std::size_t s = 0; s < sites_.size(); ++s) {
    const auto k = impl_->free_index[s];
    out[s] = mean_[s] + (k >= 0 ? x(k) : 0.0);
  }
}

SampleStream GaussianMarginal::sample_stream(std::size_t n, std::uint64_t seed, std::uint64_t stream) const {
  SampleStream s;
  s.region = sites_;
  s.method = Method::Exact;
  s.seed = seed;
  Rng rng(seed, stream);
  std::vector<double> x;
  s.data.reserve(n * sites_.size());
  for (std::size_t k = 0; k < n; ++k) {
    sample(rng, x);
    s.append(x);
  }
  return s;
}

Estimate estimate_observable(const SampleStream& stream, const std::function<double(std::span<const double>)>& f) {
  if (stream.n == 0) throw Error(ErrorCode::TooFewSamples, "empty stream");
  std::vector<double> vals(stream.n);
  for (std::size_t i = 0; i < stream.n; ++i) vals[i] = f(stream.row(i));
  const BatchMeans bm = batch_means(vals);
  return {bm.mean, bm.se, bm.tau};
}

}  // namespace ggl
