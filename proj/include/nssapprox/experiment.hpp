#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nssapprox/descriptors.hpp"
#include "nssapprox/error.hpp"
#include "nssapprox/non_anova.hpp"

namespace nssapprox {

inline constexpr const char* kArtifactVersion = NSSAPPROX_VERSION;

struct BoundsInput {
  double d_lambda = 0.0;
  double d_gamma_low = 0.0;
  double d_gamma_up = 0.0;
  double s = 0.0;
};

struct CompareGrid {
  std::vector<double> d_gamma;
  std::vector<double> d_lambda;
  std::vector<double> s;
};

struct WitnessInput {
  double h_norm_sq = 1.0;
  double c1 = 0.5;
  std::vector<double> budget_grid;
};

/// Validated experiment description; see configs/ for examples.
struct ExperimentConfig {
  Json source;  ///< the parsed document, hashed for provenance
  std::optional<ProblemModel> model;
  CostFunction cost = CostFunction::polynomial(1.0);
  CostMode mode = CostMode::nss;
  std::optional<Threshold> epsilon;
  std::vector<double> eps_grid;
  Index term_budget = 10'000'000;
  std::string output_prefix;
  std::optional<double> non_anova_c;
  double non_anova_rel_tol = 1e-6;
  std::optional<WitnessInput> witness;
  std::optional<BoundsInput> bounds;
  std::optional<CompareGrid> compare;
};

/// Throws schema-violation on malformed input.
ExperimentConfig parse_experiment_config(const Json& j);

/// eps_k = start * factor^k down to stop (inclusive within rounding).
std::vector<double> geometric_grid(double start, double stop, double factor);

/// FNV-1a 64 of the compact JSON dump, as 16 hex digits.
std::string config_hash(const Json& j);

struct Artifact {
  std::string filename;
  std::string content;
};

/// enumerate | curve | rates | bounds | nonanova | witness | compare.
std::vector<Artifact> run_experiment(const std::string& subcommand,
                                     const ExperimentConfig& config,
                                     unsigned threads = 1);

/// 17 significant digits, '.' decimal, locale independent.
std::string format_real(double x);

/// 2 for schema and argument errors, 3 for computation errors.
int exit_code_for(ErrorKind kind) noexcept;

}  // namespace nssapprox
