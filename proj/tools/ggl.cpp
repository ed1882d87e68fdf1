#include <iostream>

#include "CLI11.hpp"

#include "ggl/config.hpp"
#include "ggl/error.hpp"
#include "ggl/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Gradient Gibbs measure experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir, resume_dir, validate_path;
  auto* run = app.add_subcommand("run", "Run an experiment from a config file");
  run->add_option("config", config_path, "INI config")->required();
  run->add_option("-o,--output", out_dir, "Artifact directory");
  auto* resume = app.add_subcommand("resume", "Continue an interrupted run");
  resume->add_option("dir", resume_dir, "Artifact directory")->required();
  auto* validate = app.add_subcommand("validate", "Parse and check a config without running");
  validate->add_option("config", validate_path, "INI config")->required();
  auto* list = app.add_subcommand("list-presets", "Print the Γ and potential presets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const ggl::ExperimentConfig c = ggl::load_config(config_path);
      const std::filesystem::path dir =
          !out_dir.empty() ? std::filesystem::path(out_dir)
                           : (!c.output.empty() ? std::filesystem::path(c.output) : ggl::default_output_dir(c));
      const ggl::RunOutcome r = ggl::run_experiment(c, dir);
      std::cout << r.status << " " << r.dir.string() << ": " << r.message << "\n";
      return r.exit_code;
    }
    if (*resume) {
      const ggl::RunOutcome r = ggl::resume_experiment(resume_dir);
      std::cout << r.status << " " << r.dir.string() << ": " << r.message << "\n";
      return r.exit_code;
    }
    if (*validate) {
      const ggl::ExperimentConfig c = ggl::load_config(validate_path);
      c.graph();
      if (c.box > 0) c.region();
      std::cout << "ok " << ggl::to_string(c.kind) << " config_hash=" << ggl::hex64(c.hash) << "\n";
      return ggl::kExitPass;
    }
    if (*list) {
      for (const auto& p : ggl::presets()) std::cout << p.group << "\t" << p.name << "\t" << p.description << "\n";
      return ggl::kExitPass;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ggl::kExitError;
  }
  return ggl::kExitError;
}
