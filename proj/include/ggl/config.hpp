#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ggl/decoupling.hpp"
#include "ggl/lattice.hpp"
#include "ggl/potentials.hpp"
#include "ggl/sampler.hpp"

namespace ggl {

/// Flat sectioned key = value text. '#' starts a comment anywhere, ';' only
/// at the start of a line (vertex lists use it as a separator).
class IniDocument {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static IniDocument parse(const std::string& text, const std::string& origin = "<config>");

  const std::string& origin() const { return origin_; }
  const Entry* find(const std::string& section, const std::string& key) const;
  const std::map<std::string, std::map<std::string, Entry>>& sections() const { return sections_; }
  /// Sorted "section.key=value" lines without the run-control keys
  /// (output, stop_after, checkpoint_every); the hashed identity of a config.
  std::string canonical() const;

 private:
  std::string origin_;
  std::map<std::string, std::map<std::string, Entry>> sections_;
};

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t h = 0xcbf29ce484222325ull);
std::uint64_t fnv1a64(const std::string& s);
std::string hex64(std::uint64_t v);

enum class ExperimentKind { Sample, Green, Capacity, CrossSection, Decouple, Percolate, Renorm, EvenReduce };

std::string to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& s);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Sample;
  std::string name;
  std::uint64_t seed = 0;
  std::string output;
  std::size_t workers = 1;
  /// Stop after this many samples and leave a checkpoint (sample kind).
  std::optional<std::size_t> stop_after;
  std::size_t checkpoint_every = 0;

  int dim = 3;
  std::string gamma = "nearest_neighbor";
  /// Side length of the cube centred at the origin; 0 asks for Z^d.
  int box = 9;
  Vertex x{};
  Vertex y{};
  std::vector<Vertex> S;
  std::vector<Vertex> target;
  int L = 2;
  std::vector<int> Ls;
  double h = 0.0;
  std::vector<double> hs;
  std::vector<double> eps;
  int scale_base = 2;
  int scale_R = 4;
  std::size_t embeddings = 1;
  std::vector<double> betas;

  PotentialSpec potential;
  std::string potential_kind = "quadratic";
  ConstantsConfig constants;

  std::size_t n = 1000;
  std::optional<std::size_t> burn_in;
  std::size_t thinning = 1;
  std::optional<Method> method;
  double dt = 0.0;
  double bc = 0.0;
  std::size_t n_env = 1;
  std::size_t bootstrap = 400;

  std::string text;  // as given
  std::string canonical;
  std::uint64_t hash = 0;

  LatticeGraph graph() const;
  /// Cube of side `box` around the origin.
  Region region() const;
};

/// ConfigError carries "origin:line: field: reason".
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

struct Preset {
  std::string group;
  std::string name;
  std::string description;
};

std::vector<Preset> presets();
LatticeGraph gamma_preset(const std::string& name, int dim);
PotentialSpec potential_preset(const std::string& name, double beta, double stiffness, double amplitude,
                               double radius);

}  // namespace ggl
