#include "ggl/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ggl/error.hpp"

namespace ggl {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

}  // namespace

IniDocument IniDocument::parse(const std::string& text, const std::string& origin) {
  IniDocument doc;
  doc.origin_ = origin;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorCode::ConfigError, origin + ":" + std::to_string(line) + ": " + msg);
  };
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (!s.empty() && s.front() == ';') continue;
    s = trim(s.substr(0, s.find('#')));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail("unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) fail("empty section name");
      doc.sections_[section];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    if (section.empty()) fail("key outside any section");
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) fail("empty key");
    auto& sec = doc.sections_[section];
    if (sec.count(key)) fail(section + "." + key + ": duplicate key");
    sec[key] = Entry{trim(s.substr(eq + 1)), line};
  }
  return doc;
}

const IniDocument::Entry* IniDocument::find(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  const auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

std::string IniDocument::canonical() const {
  // Run-control keys change where and how often a run stops, not its numbers.
  static const std::set<std::string> skip = {"experiment.output", "experiment.stop_after",
                                             "experiment.checkpoint_every"};
  std::string out;
  for (const auto& [sec, keys] : sections_) {
    for (const auto& [k, e] : keys) {
      if (!skip.count(sec + "." + k)) out += sec + "." + k + "=" + e.value + "\n";
    }
  }
  return out;
}

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
  return s;
}

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Sample: return "sample";
    case ExperimentKind::Green: return "green";
    case ExperimentKind::Capacity: return "capacity";
    case ExperimentKind::CrossSection: return "cross_section";
    case ExperimentKind::Decouple: return "decouple";
    case ExperimentKind::Percolate: return "percolate";
    case ExperimentKind::Renorm: return "renorm";
    case ExperimentKind::EvenReduce: return "even_reduce";
  }
  return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  for (auto k : {ExperimentKind::Sample, ExperimentKind::Green, ExperimentKind::Capacity,
                 ExperimentKind::CrossSection, ExperimentKind::Decouple, ExperimentKind::Percolate,
                 ExperimentKind::Renorm, ExperimentKind::EvenReduce}) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorCode::ConfigError, "unknown experiment kind '" + s + "'");
}

std::vector<Preset> presets() {
  return {
      {"gamma", "nearest_neighbor", "Γ = {±e_i}"},
      {"gamma", "l1_two", "Γ = {0 < |x|_1 ≤ 2}"},
      {"gamma", "linf_one", "Γ = {0 < |x|_∞ ≤ 1}"},
      {"potential", "quadratic", "V = k η²/2"},
      {"potential", "log_cosh", "V = η²/2 + log cosh η"},
      {"potential", "double_well", "e^{-V} = (η² + 1/2) e^{-η²}"},
      {"potential", "bump_well", "V = k η²/2 + a (1 - (η/r)²)³ on |η| < r"},
  };
}

LatticeGraph gamma_preset(const std::string& name, int dim) {
  if (name == "nearest_neighbor") return LatticeGraph::nearest_neighbor(dim);
  std::vector<Vertex> gens;
  const int span = name == "l1_two" ? 2 : 1;
  if (name != "l1_two" && name != "linf_one") throw Error(ErrorCode::ConfigError, "unknown gamma preset '" + name + "'");
  std::vector<int> u(static_cast<std::size_t>(dim), -span);
  while (true) {
    Vertex v{};
    for (int i = 0; i < dim; ++i) v[i] = u[static_cast<std::size_t>(i)];
    const bool keep = !is_zero(v) && (name == "l1_two" ? l1_norm(v) <= 2 : linf_norm(v) <= 1);
    if (keep) gens.push_back(v);
    int i = 0;
    while (i < dim && u[static_cast<std::size_t>(i)] == span) u[static_cast<std::size_t>(i++)] = -span;
    if (i == dim) break;
    ++u[static_cast<std::size_t>(i)];
  }
  return LatticeGraph(dim, std::move(gens));
}

PotentialSpec potential_preset(const std::string& name, double beta, double stiffness, double amplitude,
                               double radius) {
  if (name == "quadratic") return PotentialSpec::quadratic(stiffness, beta);
  if (name == "log_cosh") return PotentialSpec::log_cosh(beta);
  if (name == "double_well") return PotentialSpec::double_well(beta);
  if (name == "bump_well") return PotentialSpec::bump_well(stiffness, amplitude, radius, beta);
  throw Error(ErrorCode::ConfigError, "unknown potential preset '" + name + "'");
}

LatticeGraph ExperimentConfig::graph() const { return gamma_preset(gamma, dim); }

Region ExperimentConfig::region() const {
  if (box <= 0) throw Error(ErrorCode::ConfigError, "experiment needs a finite box");
  Vertex lo{}, hi{};
  const int a = -(box - 1) / 2;
  for (int i = 0; i < dim; ++i) {
    lo[i] = a;
    hi[i] = a + box - 1;
  }
  return Region::box(dim, lo, hi);
}

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"experiment", {"kind", "seed", "name", "output", "workers", "stop_after", "checkpoint_every"}},
      {"geometry",
       {"dim", "gamma", "box", "x", "y", "S", "target", "L", "Ls", "h", "hs", "eps", "scale_base", "scale_R",
        "embeddings", "betas"}},
      {"potential", {"kind", "beta", "stiffness", "amplitude", "radius"}},
      {"constants", {"c0", "c1", "c2", "c14", "c15", "c21", "c24", "K_decouple", "K"}},
      {"mc", {"n", "burn_in", "thinning", "method", "dt", "bc", "n_env", "bootstrap"}},
  };
  return keys;
}

class Reader {
 public:
  explicit Reader(const IniDocument& doc) : doc_(doc) {}

  [[noreturn]] void fail(const std::string& sec, const std::string& key, const std::string& msg) const {
    const auto* e = doc_.find(sec, key);
    const std::string where = e ? doc_.origin() + ":" + std::to_string(e->line) : doc_.origin();
    throw Error(ErrorCode::ConfigError, where + ": " + sec + "." + key + ": " + msg);
  }

  const std::string* raw(const std::string& sec, const std::string& key) const {
    const auto* e = doc_.find(sec, key);
    return e ? &e->value : nullptr;
  }

  double number(const std::string& sec, const std::string& key, double def) const {
    const auto* v = raw(sec, key);
    return v ? parse_double(sec, key, *v) : def;
  }

  long long integer(const std::string& sec, const std::string& key, long long def) const {
    const auto* v = raw(sec, key);
    return v ? parse_int(sec, key, *v) : def;
  }

  std::size_t count(const std::string& sec, const std::string& key, std::size_t def) const {
    const long long v = integer(sec, key, static_cast<long long>(def));
    if (v < 0) fail(sec, key, "must be nonnegative");
    return static_cast<std::size_t>(v);
  }

  std::vector<double> numbers(const std::string& sec, const std::string& key) const {
    std::vector<double> out;
    if (const auto* v = raw(sec, key)) {
      for (const auto& t : split(*v, ',')) out.push_back(parse_double(sec, key, t));
    }
    return out;
  }

  std::vector<int> integers(const std::string& sec, const std::string& key) const {
    std::vector<int> out;
    if (const auto* v = raw(sec, key)) {
      for (const auto& t : split(*v, ',')) out.push_back(static_cast<int>(parse_int(sec, key, t)));
    }
    return out;
  }

  Vertex vertex(const std::string& sec, const std::string& key, const std::string& text, int dim) const {
    const auto parts = split(text, ',');
    if (static_cast<int>(parts.size()) != dim) fail(sec, key, "vertex '" + text + "' needs " + std::to_string(dim) + " coordinates");
    Vertex v{};
    for (int i = 0; i < dim; ++i) v[i] = static_cast<std::int32_t>(parse_int(sec, key, parts[static_cast<std::size_t>(i)]));
    return v;
  }

  std::optional<Vertex> vertex(const std::string& sec, const std::string& key, int dim) const {
    const auto* v = raw(sec, key);
    if (!v) return std::nullopt;
    return vertex(sec, key, *v, dim);
  }

  std::vector<Vertex> vertices(const std::string& sec, const std::string& key, int dim) const {
    std::vector<Vertex> out;
    if (const auto* v = raw(sec, key)) {
      for (const auto& t : split(*v, ';')) out.push_back(vertex(sec, key, t, dim));
    }
    return out;
  }

 private:
  double parse_double(const std::string& sec, const std::string& key, const std::string& s) const {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0' || !std::isfinite(v)) fail(sec, key, "'" + s + "' is not a finite number");
    return v;
  }
  long long parse_int(const std::string& sec, const std::string& key, const std::string& s) const {
    long long v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) fail(sec, key, "'" + s + "' is not an integer");
    return v;
  }

  const IniDocument& doc_;
};

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  const IniDocument doc = IniDocument::parse(text, origin);
  const Reader r(doc);
  for (const auto& [sec, keys] : doc.sections()) {
    const auto known = known_keys().find(sec);
    if (known == known_keys().end()) {
      throw Error(ErrorCode::ConfigError, origin + ": unknown section [" + sec + "]");
    }
    for (const auto& [k, e] : keys) {
      if (!known->second.count(k)) r.fail(sec, k, "unknown key");
    }
  }

  ExperimentConfig c;
  const auto* kind = r.raw("experiment", "kind");
  if (!kind) throw Error(ErrorCode::ConfigError, origin + ": experiment.kind: missing");
  try {
    c.kind = experiment_kind_from_string(*kind);
  } catch (const Error& e) {
    r.fail("experiment", "kind", e.what());
  }
  if (!r.raw("experiment", "seed")) throw Error(ErrorCode::ConfigError, origin + ": experiment.seed: missing");
  const long long seed = r.integer("experiment", "seed", 0);
  if (seed < 0) r.fail("experiment", "seed", "must be nonnegative");
  c.seed = static_cast<std::uint64_t>(seed);
  if (const auto* v = r.raw("experiment", "name")) c.name = *v;
  if (const auto* v = r.raw("experiment", "output")) c.output = *v;
  c.workers = r.count("experiment", "workers", 1);
  if (r.raw("experiment", "stop_after")) c.stop_after = r.count("experiment", "stop_after", 0);
  c.checkpoint_every = r.count("experiment", "checkpoint_every", 0);

  c.dim = static_cast<int>(r.integer("geometry", "dim", 3));
  if (c.dim < 1 || c.dim > kMaxDim) r.fail("geometry", "dim", "must be in 1.." + std::to_string(kMaxDim));
  if (const auto* v = r.raw("geometry", "gamma")) c.gamma = *v;
  try {
    (void)c.graph();
  } catch (const Error& e) {
    r.fail("geometry", "gamma", e.what());
  }
  c.box = static_cast<int>(r.integer("geometry", "box", 9));
  if (c.box < 0) r.fail("geometry", "box", "must be nonnegative");
  c.x = r.vertex("geometry", "x", c.dim).value_or(Vertex{});
  c.y = r.vertex("geometry", "y", c.dim).value_or(unit_vector(0));
  c.S = r.vertices("geometry", "S", c.dim);
  c.target = r.vertices("geometry", "target", c.dim);
  c.L = static_cast<int>(r.integer("geometry", "L", 2));
  if (c.L < 1) r.fail("geometry", "L", "must be >= 1");
  c.Ls = r.integers("geometry", "Ls");
  c.h = r.number("geometry", "h", 0.0);
  c.hs = r.numbers("geometry", "hs");
  c.eps = r.numbers("geometry", "eps");
  for (double e : c.eps) {
    if (!(e > 0.0)) r.fail("geometry", "eps", "values must be positive");
  }
  c.scale_base = static_cast<int>(r.integer("geometry", "scale_base", 2));
  c.scale_R = static_cast<int>(r.integer("geometry", "scale_R", 4));
  c.embeddings = r.count("geometry", "embeddings", 1);
  c.betas = r.numbers("geometry", "betas");

  if (const auto* v = r.raw("potential", "kind")) c.potential_kind = *v;
  const double beta = r.number("potential", "beta", 1.0);
  if (!(beta > 0.0)) r.fail("potential", "beta", "must be positive");
  try {
    c.potential = potential_preset(c.potential_kind, beta, r.number("potential", "stiffness", 1.0),
                                   r.number("potential", "amplitude", 0.0), r.number("potential", "radius", 1.0));
  } catch (const Error& e) {
    r.fail("potential", "kind", e.what());
  }

  ConstantsConfig& k = c.constants;
  k.c0 = r.number("constants", "c0", k.c0);
  k.c1 = r.number("constants", "c1", k.c1);
  k.c2 = r.number("constants", "c2", k.c2);
  k.c14 = r.number("constants", "c14", k.c14);
  k.c15 = r.number("constants", "c15", k.c15);
  k.c21 = r.number("constants", "c21", k.c21);
  k.c24 = r.number("constants", "c24", k.c24);
  k.K_decouple = r.number("constants", "K_decouple", k.K_decouple);
  k.K = r.number("constants", "K", k.K);
  try {
    k.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, origin + ": [constants]: " + e.what());
  }

  c.n = r.count("mc", "n", 1000);
  if (c.n == 0) r.fail("mc", "n", "must be >= 1");
  if (r.raw("mc", "burn_in")) c.burn_in = r.count("mc", "burn_in", 0);
  c.thinning = r.count("mc", "thinning", 1);
  if (c.thinning == 0) r.fail("mc", "thinning", "must be >= 1");
  if (const auto* v = r.raw("mc", "method")) {
    try {
      c.method = method_from_string(*v);
    } catch (const Error& e) {
      r.fail("mc", "method", e.what());
    }
  }
  c.dt = r.number("mc", "dt", 0.0);
  if (c.dt < 0.0) r.fail("mc", "dt", "must be nonnegative");
  c.bc = r.number("mc", "bc", 0.0);
  c.n_env = r.count("mc", "n_env", 1);
  c.bootstrap = r.count("mc", "bootstrap", 400);

  c.text = text;
  c.canonical = doc.canonical();
  c.hash = fnv1a64(c.canonical);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

}  // namespace ggl
