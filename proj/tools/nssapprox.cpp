// Batch front end: nssapprox <subcommand> --config FILE --out DIR.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "nssapprox/experiment.hpp"

namespace fs = std::filesystem;
using namespace nssapprox;

int main(int argc, char** argv) {
  CLI::App app{"Optimal L2 approximation under nested subspace sampling"};
  app.set_version_flag("--version", std::string(kArtifactVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  unsigned threads = 1;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "Experiment config (JSON)")
      ->envname("NSSAPPROX_CONFIG")
      ->required();
  app.add_option("--out", out_dir, "Output directory")->envname("NSSAPPROX_OUT");
  app.add_option("--threads", threads, "Worker threads for grid points")
      ->envname("NSSAPPROX_THREADS")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Seed for randomized fixtures only")
      ->envname("NSSAPPROX_SEED");

  app.fallthrough();
  for (const char* name :
       {"enumerate", "curve", "rates", "bounds", "nonanova", "witness", "compare"}) {
    app.add_subcommand(name);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string subcommand = app.get_subcommands().front()->get_name();

  try {
    std::ifstream in(config_path);
    if (!in) fail(ErrorKind::schema_violation, "cannot read " + config_path);
    Json doc;
    try {
      doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
      fail(ErrorKind::schema_violation, std::string("malformed JSON: ") + e.what());
    }
    const ExperimentConfig config = parse_experiment_config(doc);
    const auto artifacts = run_experiment(subcommand, config, threads);

    fs::create_directories(out_dir);
    for (const auto& a : artifacts) {
      const fs::path path = fs::path(out_dir) / a.filename;
      std::ofstream out(path, std::ios::binary);
      out << a.content;
      if (!out) {
        std::cerr << "error: cannot write " << path.string() << "\n";
        return 3;
      }
      std::cout << path.string() << "\n";
    }
  } catch (const Error& e) {
    std::cerr << error_name(e.kind()) << ": " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
