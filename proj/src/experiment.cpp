#include "ggl/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "ggl/checkpoint.hpp"
#include "ggl/decoupling.hpp"
#include "ggl/error.hpp"
#include "ggl/even_reduction.hpp"
#include "ggl/field_source.hpp"
#include "ggl/green.hpp"
#include "ggl/hs_walk.hpp"
#include "ggl/parallel.hpp"
#include "ggl/percolation.hpp"

#ifndef GGL_VERSION
#define GGL_VERSION "dev"
#endif

namespace ggl {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

fs::path default_output_dir(const ExperimentConfig& c) {
  const std::string stem = c.name.empty() ? to_string(c.kind) : c.name;
  return fs::path("runs") / (stem + "-" + hex64(c.hash).substr(0, 8));
}

namespace {

constexpr const char* kManifest = "manifest.json";
constexpr const char* kResults = "results.csv";
constexpr const char* kReport = "report.json";
constexpr const char* kCheckpoint = "checkpoint.bin";

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string vtx(const ExperimentConfig& c, const Vertex& v) { return format_vertex(v, c.dim, ' '); }

json vtx_json(const ExperimentConfig& c, const Vertex& v) {
  json a = json::array();
  for (int i = 0; i < c.dim; ++i) a.push_back(v[i]);
  return a;
}

/// CSV with a provenance comment block; every field is preformatted.
class Csv {
 public:
  Csv(const ExperimentConfig& c, const std::vector<std::string>& columns) {
    out_ << "# config_hash=" << hex64(c.hash) << "\n";
    out_ << "# kind=" << to_string(c.kind) << "\n";
    out_ << "# code_version=" << GGL_VERSION << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << "\n";
  }
  Csv& operator<<(const std::string& s) {
    out_ << (first_ ? "" : ",") << s;
    first_ = false;
    return *this;
  }
  Csv& operator<<(double v) { return *this << format_double(v); }
  Csv& operator<<(std::size_t v) { return *this << std::to_string(v); }
  Csv& operator<<(bool v) { return *this << std::string(v ? "1" : "0"); }
  void end_row() {
    out_ << "\n";
    first_ = true;
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
  bool first_ = true;
};

struct KindResult {
  std::string csv;
  json report;
  bool pass = true;
  json tolerances = json::object();
};

json manifest_for(const ExperimentConfig& c) {
  json m;
  m["kind"] = to_string(c.kind);
  m["name"] = c.name;
  m["seed"] = c.seed;
  m["config_hash"] = hex64(c.hash);
  m["code_version"] = GGL_VERSION;
  m["workers"] = resolve_workers(c.workers);
  m["config_text"] = c.text;
  json k;
  k["c0"] = c.constants.c0;
  k["c1"] = c.constants.c1;
  k["c2"] = c.constants.c2;
  k["c14"] = c.constants.c14;
  k["c15"] = c.constants.c15;
  k["c21"] = c.constants.c21;
  k["c24"] = c.constants.c24;
  k["K_decouple"] = c.constants.K_decouple;
  k["K"] = c.constants.K;
  m["constants"] = k;
  m["status"] = "running";
  return m;
}

void save_manifest(const fs::path& dir, const json& m) { write_text(dir / kManifest, m.dump(2) + "\n"); }

BoundaryCondition bc_of(const ExperimentConfig& c) { return BoundaryCondition::constant_value(c.bc); }

double gaussian_scale(const ExperimentConfig& c, const LatticeGraph& g) {
  return c.potential.beta * c.potential.stiffness * static_cast<double>(g.degree());
}

Method default_method(const ExperimentConfig& c) {
  if (c.method) return *c.method;
  return c.potential.convex ? Method::HeatBath : Method::Mala;
}

FieldSource source_for(const ExperimentConfig& c, const LatticeGraph& g, const Region& lambda, const Region& sites) {
  if (c.potential.kind == PotentialKind::Quadratic && (!c.method || *c.method == Method::Exact)) {
    return gaussian_marginal_source(g, lambda, bc_of(c), c.potential.stiffness, c.potential.beta, sites);
  }
  SamplerOptions so;
  so.method = default_method(c);
  so.burn_in = c.burn_in;
  so.thinning = c.thinning;
  so.dt = c.dt;
  return mcmc_source(c.potential, g, lambda, bc_of(c), so);
}

// ---------------------------------------------------------------------------

KindResult run_green(const ExperimentConfig& c) {
  const LatticeGraph g = c.graph();
  GreenValue v;
  if (c.box == 0) {
    v = green(g, Infinite{}, c.x, c.y);
  } else {
    v = green(g, c.region(), c.x, c.y);
  }
  KindResult r;
  const double cov = v.value / gaussian_scale(c, g);
  Csv csv(c, {"x", "y", "g", "error_bound", "covariance"});
  csv << vtx(c, c.x) << vtx(c, c.y) << v.value << v.error_bound << cov;
  csv.end_row();
  r.csv = csv.str();
  r.report["g"] = v.value;
  r.report["error_bound"] = v.error_bound;
  r.report["covariance"] = cov;
  r.tolerances["cg_rel_tol"] = 1e-12;
  if (c.box == 0) r.tolerances["extrapolation_tol"] = Infinite{}.tol;
  return r;
}

KindResult run_capacity(const ExperimentConfig& c) {
  const LatticeGraph g = c.graph();
  const Region U(c.dim, c.target.empty() ? std::vector<Vertex>{c.x} : c.target);
  const Region domain = c.region();
  const EquilibriumResult e = equilibrium_and_capacity(g, U, domain);
  const CapacityValue inf = capacity_infinite(g, U, Infinite{});
  KindResult r;
  Csv csv(c, {"vertex", "equilibrium"});
  for (std::size_t i = 0; i < e.e.support.size(); ++i) {
    csv << vtx(c, e.e.support[i]) << e.e.weights[i];
    csv.end_row();
  }
  r.csv = csv.str();
  r.report["cap_box"] = e.cap;
  r.report["identity_residual"] = e.identity_residual;
  r.report["cap_infinite"] = inf.cap;
  r.report["cap_infinite_error_bound"] = inf.error_bound;
  r.pass = e.identity_residual <= 1e-6;
  r.tolerances["identity_residual"] = 1e-6;
  return r;
}

KindResult run_cross_section(const ExperimentConfig& c) {
  const LatticeGraph g = c.graph();
  const Region lambda = c.region();
  const Region S(c.dim, c.S.empty() ? std::vector<Vertex>{c.x} : c.S);
  const Region T(c.dim, c.target.empty() ? std::vector<Vertex>{c.y} : c.target);
  CrossSectionOptions o;
  o.bc_values = {c.bc};
  o.n_env = c.n_env;
  o.dt = c.dt;
  o.bootstrap = c.bootstrap;
  o.workers = resolve_workers(c.workers);
  const CrossSectionResult res = cross_section(c.potential, g, S, T, lambda, c.n, c.seed, o);
  KindResult r;
  Csv csv(c, {"x", "bc_value", "env", "p", "se", "w"});
  for (const auto& row : res.rows) {
    csv << vtx(c, row.x) << row.bc_value << row.env << row.p << row.se << row.w;
    csv.end_row();
  }
  r.csv = csv.str();
  r.report["sigma"] = res.sigma;
  r.report["ci"] = {res.ci.lo, res.ci.hi};
  r.report["sigma_srw"] = res.sigma_srw;
  r.tolerances["bootstrap_level"] = 0.95;
  return r;
}

KindResult run_decouple(const ExperimentConfig& c) {
  const LatticeGraph g = c.graph();
  const Region lambda = c.region();
  const Region S(c.dim, c.S.empty() ? std::vector<Vertex>{c.x} : c.S);
  const Region T(c.dim, c.target.empty() ? std::vector<Vertex>{c.y} : c.target);
  std::vector<MonotoneEvent> a, f;
  for (const auto& v : S) a.push_back(MonotoneEvent::literal(v, c.dim));
  for (const auto& v : T) f.push_back(MonotoneEvent::literal(v, c.dim));
  const MonotoneEvent A = a.size() == 1 ? a[0] : MonotoneEvent::all_of(a);
  const Observable obs = Observable::indicator(f.size() == 1 ? f[0] : MonotoneEvent::all_of(f), c.h);
  const std::vector<double> eps = c.eps.empty() ? std::vector<double>{0.1, 0.3, 1.0} : c.eps;
  const FieldSource src = source_for(c, g, lambda, S.united(T));
  DecouplingOptions o;
  o.constants = c.constants;
  const auto reps = decoupling_experiment(src, g, lambda, S, T, A, obs, c.h, eps, c.n, c.seed, o);

  std::optional<double> oracle;
  if (c.potential.kind == PotentialKind::Quadratic && S.size() == 1 && T.size() == 1) {
    GreenOperator G(g, lambda);
    const double s = gaussian_scale(c, g);
    const Vertex x = S[0], y = T[0];
    oracle = bivariate_normal_upper(c.h - c.bc, c.h - c.bc, G(x, x) / s, G(y, y) / s, G(x, y) / s);
  }

  KindResult r;
  Csv csv(c, {"eps", "lhs", "lhs_se", "mu_A_h", "mu_A_sprinkled", "mean_f", "delta", "M", "upper", "upper_se",
              "lower", "lower_se", "upper_ok", "lower_ok", "oracle_lhs"});
  json rows = json::array();
  for (const auto& d : reps) {
    csv << d.eps << d.lhs.value << d.lhs.se << d.mu_A_h.value << d.mu_A_sprinkled.value << d.mean_f.value << d.delta
        << d.M << d.upper << d.upper_se << d.lower << d.lower_se << d.upper_ok << d.lower_ok
        << (oracle ? format_double(*oracle) : std::string("nan"));
    csv.end_row();
    r.pass = r.pass && d.pass;
    rows.push_back({{"eps", d.eps}, {"pass", d.pass}, {"upper", d.upper}, {"lower", d.lower}});
  }
  r.csv = csv.str();
  r.report["source"] = src.description;
  r.report["h"] = c.h;
  r.report["lhs"] = reps.front().lhs.value;
  r.report["lhs_se"] = reps.front().lhs.se;
  r.report["sigma_hat"] = reps.front().sigma_hat;
  if (oracle) {
    r.report["oracle_lhs"] = *oracle;
    const double z = (reps.front().lhs.value - *oracle) / std::max(reps.front().lhs.se, 1e-300);
    r.report["oracle_z"] = z;
    r.pass = r.pass && std::abs(z) <= 3.0;
  }
  r.report["rows"] = rows;
  r.tolerances["sigma_multiple"] = 3.0;
  return r;
}

KindResult run_percolate(const ExperimentConfig& c) {
  const LatticeGraph g = c.graph();
  const Region lambda = c.region();
  const std::vector<double> hs = c.hs.empty() ? std::vector<double>{c.h} : c.hs;
  const std::vector<int> Ls = c.Ls.empty() ? std::vector<int>{c.L} : c.Ls;
  const int Lmax = *std::max_element(Ls.begin(), Ls.end());
  const Region sites = MonotoneEvent::ball_crossing(g, c.x, Lmax).support();
  if (!sites.subset_of(lambda)) throw Error(ErrorCode::InvalidArgument, "B(x, 2L) and its boundary leave the box");
  const FieldSource src = source_for(c, g, lambda, sites);
  const ScanReport scan = h_plus_scan(src, g, c.x, hs, Ls, c.n, c.seed);
  KindResult r;
  Csv csv(c, {"h", "L", "p", "se"});
  for (std::size_t i = 0; i < hs.size(); ++i) {
    for (std::size_t j = 0; j < Ls.size(); ++j) {
      csv << hs[i] << std::to_string(Ls[j]) << scan.p[i][j].p << scan.p[i][j].se;
      csv.end_row();
    }
  }
  r.csv = csv.str();
  json fits = json::array();
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const auto& f = scan.fits[i];
    fits.push_back({{"h", hs[i]}, {"valid", f.valid}, {"log_c", f.log_c}, {"c_prime", f.c_prime}, {"rho", f.rho},
                    {"rss", f.rss}, {"points", f.points}});
  }
  r.report["source"] = src.description;
  r.report["monotone_in_h"] = scan.monotone_in_h;
  r.report["fits"] = fits;
  r.pass = scan.monotone_in_h;
  return r;
}

KindResult run_renorm(const ExperimentConfig& c) {
  const LatticeGraph g = c.graph();
  const Region lambda = c.region();
  Scales sc;
  sc.base = c.scale_base;
  sc.R = c.scale_R;
  sc.strict = false;
  const auto taus = proper_embeddings(c.x, 1, sc, g, EmbeddingVariant::Xi, SampleMode{c.embeddings, c.seed});
  const double eps0 = renorm_eps(c.constants, 0, sc.R);
  const std::vector<double> eps = c.eps.empty() ? std::vector<double>{eps0} : c.eps;
  const std::vector<double> hs = c.hs.empty() ? std::vector<double>{c.h} : c.hs;
  KindResult r;
  Csv csv(c, {"embedding", "h", "eps", "eps_n", "delta_n", "lhs", "lhs_se", "left", "right", "product",
              "product_se", "pass"});
  json embs = json::array();
  for (std::size_t e = 0; e < taus.size(); ++e) {
    const auto& tau = taus[e];
    std::vector<MonotoneEvent> leaves;
    Region sites(c.dim, {});
    for (auto leaf : tau.leaves()) {
      leaves.push_back(MonotoneEvent::ball_crossing(g, tau.tau[leaf], c.L));
      sites = sites.united(leaves.back().support());
    }
    if (!sites.subset_of(lambda)) throw Error(ErrorCode::InvalidArgument, "leaf supports leave the box");
    const FieldSource src = source_for(c, g, lambda, sites);
    const SampleStream s = src.draw(c.n, c.seed + 1000003ull * e);
    json t = json::array();
    for (const auto& v : tau.tau) t.push_back(vtx_json(c, v));
    embs.push_back(t);
    for (double h : hs) {
      for (double ep : eps) {
        const RenormReport rep = renorm_step_check(s, src.independent, tau, leaves, h, ep, c.constants);
        csv << e << h << ep << rep.eps_n << rep.delta_n << rep.lhs.value << rep.lhs.se << rep.left.value
            << rep.right.value << rep.product << rep.product_se << rep.pass;
        csv.end_row();
        r.pass = r.pass && rep.pass;
      }
    }
  }
  r.csv = csv.str();
  r.report["embeddings"] = embs;
  r.report["eps_0"] = eps0;
  r.report["delta_0"] = renorm_delta(c.constants, 0, sc.R);
  r.tolerances["sigma_multiple"] = 3.0;
  return r;
}

KindResult run_even_reduce(const ExperimentConfig& c) {
  if (c.gamma != "nearest_neighbor") throw Error(ErrorCode::ConfigError, "even reduction needs the nearest-neighbour graph");
  const Region lambda = f_star_hull(c.region(), c.dim);
  MarginalOptions o;
  o.n = c.n;
  o.seed = c.seed;
  o.bc = bc_of(c);
  o.burn_in = c.burn_in;
  o.thinning = c.thinning;
  if (c.method) o.full_method = o.even_method = *c.method;
  const std::vector<Vertex> sites = c.S.empty() ? std::vector<Vertex>{c.x} : c.S;
  const MarginalReport rep = marginal_agreement_test(c.potential, c.potential.beta, lambda, sites, o);
  KindResult r;
  Csv csv(c, {"site", "ks", "critical", "ess_full", "ess_even", "mean_full", "mean_even", "var_full", "var_even",
              "pass"});
  for (const auto& s : rep.sites) {
    csv << vtx(c, s.site) << s.ks << s.critical << s.ess_full << s.ess_even << s.mean_full << s.mean_even
        << s.var_full << s.var_even << s.pass;
    csv.end_row();
  }
  r.csv = csv.str();
  r.report["full_method"] = to_string(rep.full_method);
  r.report["even_method"] = to_string(rep.even_method);
  r.report["alpha_per_site"] = rep.alpha_per_site;
  r.report["warnings"] = rep.warnings;
  json moments = json::array();
  for (const auto& m : rep.moments) {
    moments.push_back({{"a", vtx_json(c, m.a)}, {"b", vtx_json(c, m.b)}, {"full", m.full}, {"even", m.even},
                       {"z", m.z}});
  }
  r.report["moments"] = moments;
  r.report["moments_pass"] = rep.moments_pass;
  if (!c.betas.empty() && c.potential.kind != PotentialKind::Quadratic) {
    const WindowReport w = convexity_window(c.potential, c.betas);
    json rows = json::array();
    for (const auto& row : w.rows) {
      rows.push_back({{"beta", row.beta}, {"convex", row.convex}, {"conductance_lo", row.conductance_lo},
                      {"conductance_hi", row.conductance_hi}, {"sqrt_beta_g_norm", row.scaling}});
    }
    r.report["g_norm"] = w.g_norm;
    r.report["window"] = rows;
    r.report["window_edge"] = w.edge ? json(*w.edge) : json(nullptr);
  }
  r.pass = rep.pass;
  r.tolerances["ks_alpha"] = o.alpha;
  return r;
}

// ---------------------------------------------------------------------------
// Sampling runs are the only kind with checkpoints.

struct SampleRun {
  const ExperimentConfig& c;
  fs::path dir;
  LatticeGraph graph;
  Region region;
  BoundaryCondition bc;
  Method method;
};

KindResult finish_sample(const SampleRun& run, const std::vector<double>& acc, double acceptance, double dt) {
  const auto& c = run.c;
  // Re-read the series for batch-means errors; %.17g round-trips exactly.
  std::istringstream in(read_text(run.dir / kResults));
  std::string line;
  std::vector<double> xs;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 's') continue;
    const auto a = line.find(',');
    const auto b = line.find(',', a + 1);
    xs.push_back(std::strtod(line.substr(a + 1, b - a - 1).c_str(), nullptr));
  }
  const double n = static_cast<double>(c.n);
  const double mean_x = acc[0] / n, mean_y = acc[2] / n;
  const double var_x = acc[1] / n - mean_x * mean_x;
  const double cov_xy = acc[3] / n - mean_x * mean_y;
  std::vector<double> sq(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = (xs[i] - mean_x) * (xs[i] - mean_x);
  const bool iid = run.method == Method::Exact;
  const MeanSe sx = estimate_mean(xs, iid);
  const MeanSe sv = estimate_mean(sq, iid);

  KindResult r;
  r.report["method"] = to_string(run.method);
  r.report["n"] = c.n;
  r.report["mean_x"] = mean_x;
  r.report["mean_x_se"] = sx.se;
  r.report["var_x"] = var_x;
  r.report["var_x_se"] = sv.se;
  r.report["cov_xy"] = cov_xy;
  r.report["acceptance"] = acceptance;
  r.report["dt"] = dt;
  if (c.potential.kind == PotentialKind::Quadratic) {
    GreenOperator G(run.graph, run.region);
    const double oracle = G(c.x, c.x) / gaussian_scale(c, run.graph);
    const double z = sv.se > 0.0 ? (var_x - oracle) / sv.se : 0.0;
    r.report["var_x_oracle"] = oracle;
    r.report["var_x_z"] = z;
    r.pass = std::abs(z) <= 3.0;
  }
  r.tolerances["sigma_multiple"] = 3.0;
  return r;
}

RunOutcome run_sample(const ExperimentConfig& c, const fs::path& dir, json& manifest, std::optional<Checkpoint> ckpt,
                      const std::chrono::steady_clock::time_point t0) {
  SampleRun run{c, dir, c.graph(), c.region(), bc_of(c), default_method(c)};
  const auto ix = run.region.index_of(c.x), iy = run.region.index_of(c.y);
  if (ix < 0 || iy < 0) throw Error(ErrorCode::InvalidArgument, "x and y must lie in the box");
  const auto model = make_energy_model(c.potential, run.graph, run.region, run.bc);
  std::optional<GaussianField> exact;
  if (run.method == Method::Exact) {
    if (c.potential.kind != PotentialKind::Quadratic) throw Error(ErrorCode::MethodUnsupported, "exact sampling needs a quadratic potential");
    exact.emplace(dirichlet_gaussian(run.graph, run.region, run.bc, c.potential.stiffness, c.potential.beta));
  }
  if (run.method == Method::HeatBath && !c.potential.convex) {
    throw Error(ErrorCode::MethodUnsupported, "heat-bath requested for a nonconvex potential");
  }

  Checkpoint state;
  std::unique_ptr<Chain> chain;
  std::optional<Rng> rng;
  const double dt0 = c.dt > 0.0 ? c.dt : (run.method == Method::Exact ? 0.0 : default_dt(*model));
  if (ckpt) {
    state = *ckpt;
    fs::resize_file(dir / kResults, state.csv_bytes);
    if (exact) {
      rng.emplace(state.chain.rng);
    } else {
      chain = std::make_unique<Chain>(*model, run.method, state.chain, 1e6);
    }
  } else {
    state.config_hash = c.hash;
    state.accumulators.assign(4, 0.0);
    Csv header(c, {"sample", "phi_x", "phi_y"});
    write_text(dir / kResults, header.str());
    if (exact) {
      rng.emplace(c.seed, 0);
    } else {
      chain = std::make_unique<Chain>(*model, run.method, std::vector<double>(run.region.size(), c.bc), c.seed, 0,
                                      dt0, 1e6);
    }
  }

  if (chain && !state.burned_in) {
    const std::size_t burn = c.burn_in ? *c.burn_in : default_burn_in(run.region);
    for (std::size_t s = 0; s < burn; ++s) {
      chain->sweep();
      if ((s + 1) % 50 == 0) chain->tune(0.6);
    }
  }
  if (!ckpt) {
    // Acceptance is reported over the sampling phase only.
    state.accumulators.push_back(chain ? static_cast<double>(chain->state().accepted) : 0.0);
    state.accumulators.push_back(chain ? static_cast<double>(chain->state().proposed) : 0.0);
  }
  state.burned_in = true;

  std::ofstream out(dir / kResults, std::ios::binary | std::ios::app);
  std::vector<double> phi(run.region.size());
  auto snapshot = [&]() {
    out.flush();
    state.csv_bytes = fs::file_size(dir / kResults);
    if (chain) state.chain = chain->state();
    if (rng) state.chain.rng = rng->state();
    write_checkpoint(dir / kCheckpoint, state);
  };
  while (state.samples_done < c.n) {
    const double* row;
    if (exact) {
      exact->sample(*rng, phi);
      row = phi.data();
    } else {
      for (std::size_t t = 0; t < c.thinning; ++t) chain->sweep();
      row = chain->phi().data();
    }
    const double x = row[ix], y = row[iy];
    auto& a = state.accumulators;
    a[0] += x;
    a[1] += x * x;
    a[2] += y;
    a[3] += x * y;
    out << state.samples_done << "," << format_double(x) << "," << format_double(y) << "\n";
    ++state.samples_done;
    if (c.checkpoint_every && state.samples_done % c.checkpoint_every == 0) snapshot();
    if (c.stop_after && state.samples_done == *c.stop_after && state.samples_done < c.n) {
      snapshot();
      manifest["status"] = "interrupted";
      manifest["exit_code"] = kExitInterrupted;
      manifest["samples_done"] = state.samples_done;
      save_manifest(dir, manifest);
      return {kExitInterrupted, dir, "interrupted", "stopped after " + std::to_string(state.samples_done) + " samples"};
    }
  }
  snapshot();
  out.close();

  double acceptance = 1.0;
  if (chain) {
    const auto& s = chain->state();
    const double prop = static_cast<double>(s.proposed) - state.accumulators[5];
    acceptance = prop > 0.0 ? (static_cast<double>(s.accepted) - state.accumulators[4]) / prop : 1.0;
  }
  KindResult r = finish_sample(run, state.accumulators, acceptance, chain ? chain->dt() : 0.0);
  r.report = json{{"kind", to_string(c.kind)}, {"pass", r.pass}, {"result", r.report}};
  write_text(dir / kReport, r.report.dump(2) + "\n");
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  manifest["status"] = "complete";
  manifest["exit_code"] = r.pass ? kExitPass : kExitStatFail;
  manifest["tolerances"] = r.tolerances;
  manifest["results"] = {kResults, kReport, kCheckpoint};
  manifest["wall_time_seconds"] = wall;
  save_manifest(dir, manifest);
  return {r.pass ? kExitPass : kExitStatFail, dir, "complete", r.pass ? "pass" : "statistical check failed"};
}

RunOutcome execute(const ExperimentConfig& c, const fs::path& dir, json manifest, std::optional<Checkpoint> ckpt) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (c.kind == ExperimentKind::Sample) return run_sample(c, dir, manifest, std::move(ckpt), t0);
    KindResult r;
    switch (c.kind) {
      case ExperimentKind::Green: r = run_green(c); break;
      case ExperimentKind::Capacity: r = run_capacity(c); break;
      case ExperimentKind::CrossSection: r = run_cross_section(c); break;
      case ExperimentKind::Decouple: r = run_decouple(c); break;
      case ExperimentKind::Percolate: r = run_percolate(c); break;
      case ExperimentKind::Renorm: r = run_renorm(c); break;
      case ExperimentKind::EvenReduce: r = run_even_reduce(c); break;
      case ExperimentKind::Sample: break;
    }
    r.report = json{{"kind", to_string(c.kind)}, {"pass", r.pass}, {"result", r.report}};
    write_text(dir / kResults, r.csv);
    write_text(dir / kReport, r.report.dump(2) + "\n");
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest["status"] = "complete";
    manifest["exit_code"] = r.pass ? kExitPass : kExitStatFail;
    manifest["tolerances"] = r.tolerances;
    manifest["results"] = {kResults, kReport};
    manifest["wall_time_seconds"] = wall;
    save_manifest(dir, manifest);
    return {r.pass ? kExitPass : kExitStatFail, dir, "complete", r.pass ? "pass" : "statistical check failed"};
  } catch (const std::exception& e) {
    manifest["status"] = "failed";
    manifest["exit_code"] = kExitError;
    manifest["error"] = e.what();
    save_manifest(dir, manifest);
    throw;
  }
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& c, const fs::path& dir) {
  fs::create_directories(dir);
  for (const char* f : {kResults, kReport, kCheckpoint}) fs::remove(dir / f);
  json manifest = manifest_for(c);
  save_manifest(dir, manifest);
  return execute(c, dir, std::move(manifest), std::nullopt);
}

RunOutcome resume_experiment(const fs::path& dir) {
  json manifest;
  try {
    manifest = json::parse(read_text(dir / kManifest));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptCheckpoint, "unreadable manifest: " + std::string(e.what()));
  }
  const ExperimentConfig c = parse_config(manifest.at("config_text").get<std::string>(), (dir / kManifest).string());
  if (manifest.value("status", "") == "complete") {
    return {kExitPass, dir, "complete", "already complete"};
  }
  if (c.kind != ExperimentKind::Sample || !fs::exists(dir / kCheckpoint)) {
    return run_experiment(c, dir);
  }
  Checkpoint ckpt = read_checkpoint(dir / kCheckpoint);
  if (ckpt.config_hash != c.hash) throw Error(ErrorCode::CorruptCheckpoint, "checkpoint belongs to another config");
  manifest["status"] = "running";
  save_manifest(dir, manifest);
  return execute(c, dir, std::move(manifest), std::move(ckpt));
}

}  // namespace ggl
