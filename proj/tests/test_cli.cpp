#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "json.hpp"
#include "ggl/checkpoint.hpp"
#include "ggl/config.hpp"
#include "ggl/experiment.hpp"

using namespace ggl;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ggl_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json manifest_without_wall_time(const fs::path& dir) {
  auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  m.erase("wall_time_seconds");
  return m;
}

const char* kSample = R"(
[experiment]
kind = sample
seed = 11
[geometry]
box = 3
x = 0,0,0
y = 1,0,0
[potential]
kind = log_cosh
[mc]
n = 400
method = heatbath
burn_in = 50
)";

}  // namespace

TEST_CASE("config parsing") {
  ggl::test::check_throws_code([] { parse_config("[experiment]\nkind = green\n"); }, ErrorCode::ConfigError);
  ggl::test::check_throws_code([] { parse_config("[experiment]\nseed = 1\n"); }, ErrorCode::ConfigError);
  ggl::test::check_throws_code([] { parse_config("[experiment]\nkind = nope\nseed = 1\n"); }, ErrorCode::ConfigError);
  ggl::test::check_throws_code([] { parse_config("[experiment]\nkind = green\nseed = 1\nbogus = 2\n"); },
                               ErrorCode::ConfigError);
  ggl::test::check_throws_code([] { parse_config("[experiment]\nkind = green\nseed = -1\n"); }, ErrorCode::ConfigError);
  ggl::test::check_throws_code([] { parse_config("[experiment\nkind = green\n"); }, ErrorCode::ConfigError);
  ggl::test::check_throws_code([] { parse_config("kind = green\n"); }, ErrorCode::ConfigError);
  ggl::test::check_throws_code([] { parse_config("[experiment]\nkind = green\nseed = 1\n[geometry]\nx = 1,2\n"); },
                               ErrorCode::ConfigError);
  try {
    parse_config("[experiment]\nkind = green\nseed = 1\n\n[geometry]\ndim = 9\n", "cfg.ini");
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("cfg.ini:6") != std::string::npos);
    CHECK(std::string(e.what()).find("geometry.dim") != std::string::npos);
  }

  const auto c = parse_config(
      "; leading comment\n[experiment]\nkind = decouple  # trailing\nseed = 7\n[geometry]\nS = 0,0,0;1,0,0\n"
      "eps = 0.1, 0.5\n");
  CHECK(c.kind == ExperimentKind::Decouple);
  CHECK(c.seed == 7);
  REQUIRE(c.S.size() == 2);
  CHECK(c.S[1] == unit_vector(0));
  CHECK(c.eps == std::vector<double>{0.1, 0.5});
}

TEST_CASE("config hash ignores run-control keys only") {
  const std::string base = "[experiment]\nkind = green\nseed = 1\n";
  const auto a = parse_config(base);
  const auto b = parse_config(base + "output = /tmp/x\nstop_after = 5\ncheckpoint_every = 2\n# note\n");
  const auto c = parse_config("[experiment]\nseed = 1\nkind = green\n");
  const auto d = parse_config("[experiment]\nkind = green\nseed = 2\n");
  CHECK(a.hash == b.hash);
  CHECK(a.hash == c.hash);
  CHECK(a.hash != d.hash);
  CHECK(hex64(0x1234).size() == 16);
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("checkpoint encoding") {
  Checkpoint c;
  c.config_hash = 0xdeadbeef;
  c.burned_in = true;
  c.samples_done = 12;
  c.csv_bytes = 345;
  c.chain.phi = {1.5, -2.25, 1e-300};
  c.chain.step_count = 99;
  c.chain.dt = 0.125;
  c.chain.accepted = 3;
  c.chain.proposed = 4;
  c.chain.rng = Rng(5, 6).state();
  c.accumulators = {1, 2, 3};
  const auto bytes = encode_checkpoint(c);
  const Checkpoint r = decode_checkpoint(bytes);
  CHECK(r.config_hash == c.config_hash);
  CHECK(r.burned_in);
  CHECK(r.samples_done == 12);
  CHECK(r.csv_bytes == 345);
  CHECK(r.chain.phi == c.chain.phi);
  CHECK(r.chain.step_count == 99);
  CHECK(r.chain.dt == 0.125);
  CHECK(r.accumulators == c.accumulators);
  CHECK(encode_checkpoint(r) == bytes);

  auto flipped = bytes;
  flipped[30] ^= 1;
  ggl::test::check_throws_code([&] { decode_checkpoint(flipped); }, ErrorCode::CorruptCheckpoint);
  auto cut = bytes;
  cut.pop_back();
  ggl::test::check_throws_code([&] { decode_checkpoint(cut); }, ErrorCode::CorruptCheckpoint);
  auto version = bytes;
  version[8] = 2;
  ggl::test::check_throws_code([&] { decode_checkpoint(version); }, ErrorCode::CheckpointVersionMismatch);
  ggl::test::check_throws_code([] { decode_checkpoint({1, 2, 3}); }, ErrorCode::CorruptCheckpoint);

  const fs::path dir = scratch("ckpt");
  write_checkpoint(dir / "c.bin", c);
  CHECK(encode_checkpoint(read_checkpoint(dir / "c.bin")) == bytes);
  CHECK_FALSE(fs::exists(dir / "c.bin.tmp"));
}

TEST_CASE("doubles round-trip through the CSV format") {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::ldexp(rng.normal(), static_cast<int>(rng.below(200)) - 100);
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("green run writes one row") {
  const fs::path dir = scratch("green");
  const auto c = parse_config("[experiment]\nkind = green\nseed = 0\n[geometry]\nbox = 1\nx = 0,0,0\ny = 0,0,0\n");
  const auto r = run_experiment(c, dir);
  CHECK(r.exit_code == kExitPass);
  CHECK(r.status == "complete");
  std::istringstream csv(slurp(dir / "results.csv"));
  std::vector<std::string> data;
  for (std::string line; std::getline(csv, line);) {
    if (!line.empty() && line[0] != '#') data.push_back(line);
  }
  REQUIRE(data.size() == 2);
  CHECK(data[0] == "x,y,g,error_bound,covariance");
  CHECK(data[1].rfind("0 0 0,0 0 0,1,", 0) == 0);
  const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(m["status"] == "complete");
  CHECK(m["config_hash"] == hex64(c.hash));
  CHECK(nlohmann::json::parse(slurp(dir / "report.json"))["result"]["g"] == 1.0);
}

TEST_CASE("decouple reruns are byte-identical") {
  const std::string text =
      "[experiment]\nkind = decouple\nseed = 4\n[geometry]\nbox = 5\nx = -1,0,0\ny = 1,0,0\nh = 0.2\neps = 0.3,1\n"
      "[mc]\nn = 2000\n";
  const auto c = parse_config(text);
  const fs::path a = scratch("dec_a"), b = scratch("dec_b");
  run_experiment(c, a);
  run_experiment(c, b);
  CHECK(slurp(a / "results.csv") == slurp(b / "results.csv"));
  CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
  CHECK(manifest_without_wall_time(a) == manifest_without_wall_time(b));
}

TEST_CASE("interrupted sampling resumes to the uninterrupted result") {
  const fs::path full = scratch("sample_full"), part = scratch("sample_part");
  const auto c = parse_config(kSample);
  const auto r = run_experiment(c, full);
  CHECK(r.status == "complete");

  auto cs = parse_config(std::string(kSample));
  cs.stop_after = 150;
  cs.checkpoint_every = 40;
  const auto i = run_experiment(cs, part);
  CHECK(i.exit_code == kExitInterrupted);
  CHECK(i.status == "interrupted");
  CHECK(fs::exists(part / "checkpoint.bin"));
  CHECK(nlohmann::json::parse(slurp(part / "manifest.json"))["status"] == "interrupted");

  const auto resumed = resume_experiment(part);
  CHECK(resumed.status == "complete");
  CHECK(resumed.exit_code == r.exit_code);
  CHECK(slurp(part / "results.csv") == slurp(full / "results.csv"));
  CHECK(slurp(part / "report.json") == slurp(full / "report.json"));

  const std::string before = slurp(part / "results.csv");
  const auto again = resume_experiment(part);
  CHECK(again.message == "already complete");
  CHECK(slurp(part / "results.csv") == before);
}

TEST_CASE("resume rejects a tampered checkpoint") {
  const fs::path dir = scratch("sample_tamper");
  auto c = parse_config(kSample);
  c.stop_after = 100;
  REQUIRE(run_experiment(c, dir).exit_code == kExitInterrupted);
  {
    std::fstream f(dir / "checkpoint.bin", std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(40);
    f.put('\x7f');
  }
  ggl::test::check_throws_code([&] { resume_experiment(dir); }, ErrorCode::CorruptCheckpoint);
}

TEST_CASE("command-line tool") {
  const fs::path dir = scratch("cli");
  {
    std::ofstream cfg(dir / "green.ini");
    cfg << "[experiment]\nkind = green\nseed = 0\n[geometry]\nbox = 3\n";
    std::ofstream bad(dir / "bad.ini");
    bad << "[experiment]\nkind = green\n";
  }
  const std::string bin = GGL_CLI_PATH;
  auto run = [&](const std::string& args) {
    const int status = std::system((bin + " " + args + " > " + (dir / "out.txt").string() + " 2>&1").c_str());
    return WEXITSTATUS(status);
  };
  CHECK(run("validate " + (dir / "green.ini").string()) == 0);
  CHECK(slurp(dir / "out.txt").rfind("ok green config_hash=", 0) == 0);
  CHECK(run("validate " + (dir / "bad.ini").string()) == kExitError);
  CHECK(slurp(dir / "out.txt").find("experiment.seed") != std::string::npos);
  CHECK(run("run " + (dir / "green.ini").string() + " -o " + (dir / "run").string()) == 0);
  CHECK(fs::exists(dir / "run" / "results.csv"));
  CHECK(run("list-presets") == 0);
  CHECK(slurp(dir / "out.txt").find("log_cosh") != std::string::npos);
}
