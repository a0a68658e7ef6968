#include "nssapprox/experiment.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace nssapprox {

namespace {

const Json* find(const Json& j, const char* key) {
  return j.contains(key) ? &j.at(key) : nullptr;
}

double get_number(const Json& j, const char* key, const std::string& where) {
  const Json* v = find(j, key);
  if (!v || !v->is_number()) {
    fail(ErrorKind::schema_violation, where + ": '" + key + "' must be a number");
  }
  return v->get<double>();
}

std::vector<double> get_numbers(const Json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) {
    fail(ErrorKind::schema_violation, where + " must be a non-empty array");
  }
  std::vector<double> out;
  for (const Json& x : v) {
    if (!x.is_number()) {
      fail(ErrorKind::schema_violation, where + " holds a non-number");
    }
    out.push_back(x.get<double>());
  }
  return out;
}

void allow_keys(const Json& j, const std::string& where,
                std::initializer_list<const char*> keys) {
  if (!j.is_object()) {
    fail(ErrorKind::schema_violation, where + " must be a JSON object");
  }
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) {
      fail(ErrorKind::schema_violation, where + ": unknown key '" + key + "'");
    }
  }
}

void check_grid(const std::vector<double>& grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0 && grid[i] < 1.0)) {
      fail(ErrorKind::schema_violation, "eps_grid values must lie in (0, 1)");
    }
    if (i > 0 && !(grid[i] < grid[i - 1])) {
      fail(ErrorKind::schema_violation, "eps_grid must be strictly decreasing");
    }
  }
}

const ProblemModel& need_model(const ExperimentConfig& c) {
  if (!c.model) fail(ErrorKind::schema_violation, "config has no 'model'");
  return *c.model;
}

Threshold need_epsilon(const ExperimentConfig& c) {
  if (!c.epsilon) {
    fail(ErrorKind::schema_violation, "config needs 'epsilon' or 'epsilon_sq'");
  }
  return *c.epsilon;
}

const std::vector<double>& need_grid(const ExperimentConfig& c) {
  if (c.eps_grid.empty()) fail(ErrorKind::schema_violation, "config has no 'eps_grid'");
  return c.eps_grid;
}

// Explicit bounds block, or claims of the model plus the cost exponent.
std::optional<BoundsInput> resolve_bounds(const ExperimentConfig& c) {
  if (c.bounds) return c.bounds;
  if (!c.model || !c.cost.is_polynomial()) return std::nullopt;
  const auto dl = c.model->lambda().claimed_decay_low();
  const auto gl = c.model->gamma().claimed_decay_low();
  const auto gu = c.model->gamma().claimed_decay_up();
  if (!dl || !gl || !gu) return std::nullopt;
  return BoundsInput{*dl, *gl, *gu, c.cost.exponent()};
}

Json bounds_json(const BoundsInput& b) {
  Json out;
  out["inputs"] = {{"d_lambda", b.d_lambda},
                   {"d_gamma_low", b.d_gamma_low},
                   {"d_gamma_up", b.d_gamma_up},
                   {"s", b.s}};
  const RateBounds a = anova_rate_bounds(b.d_lambda, b.d_gamma_low,
                                         b.d_gamma_up, b.s);
  out["anova_lower"] = a.lower;
  out["anova_upper"] = a.upper;
  out["anova_p_from_lower"] = a.p_lower;
  out["anova_p_from_upper"] = a.p_upper;
  if (std::isfinite(b.d_gamma_up)) {
    const RateBounds n = non_anova_rate_bounds(b.d_lambda, b.d_gamma_low,
                                               b.d_gamma_up, b.s);
    out["nonanova_lower"] = n.lower;
    out["nonanova_upper"] = n.upper;
  } else {
    out["nonanova_lower"] = nullptr;
    out["nonanova_upper"] = nullptr;
  }
  return out;
}

class Emitter {
 public:
  Emitter(const ExperimentConfig& c, const char* subcommand)
      : config_(c), hash_(config_hash(c.source)), subcommand_(subcommand) {}

  Json header() const {
    return {{"config_hash", hash_},
            {"version", kArtifactVersion},
            {"subcommand", subcommand_},
            {"mode", cost_mode_name(config_.mode)}};
  }

  Artifact json(const std::string& stem, Json body) const {
    Json doc = header();
    doc.update(body);
    return {config_.output_prefix + stem + ".json", doc.dump(2) + "\n"};
  }

  std::string csv_preamble(const std::string& columns) const {
    return "# config_hash=" + hash_ + " version=" + kArtifactVersion +
           " subcommand=" + subcommand_ + " mode=" + cost_mode_name(config_.mode) +
           "\n" + columns + "\n";
  }

  Artifact csv(const std::string& stem, std::string content) const {
    return {config_.output_prefix + stem + ".csv", std::move(content)};
  }

 private:
  const ExperimentConfig& config_;
  std::string hash_;
  const char* subcommand_;
};

std::string join_row(std::initializer_list<std::string> cells) {
  std::string out;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) out += ',';
    out += c;
    first = false;
  }
  return out + "\n";
}

std::string format_count(Index n) { return std::to_string(n); }

Json fit_json(std::span<const TradeoffPoint> curve, CostMode mode) {
  try {
    const RateFit fit = estimate_rate(curve, mode);
    const auto env = lower_envelope(curve, mode);
    const auto& a = env[env.size() - 2];
    const auto& b = env.back();
    const double cost_a = mode == CostMode::nss ? a.cost_nss : a.cost_unrestricted;
    const double cost_b = mode == CostMode::nss ? b.cost_nss : b.cost_unrestricted;
    const double tail = -std::log(b.exact_error / a.exact_error) /
                        std::log(cost_b / cost_a);
    return {{"rate", fit.rate},
            {"intercept", fit.intercept},
            {"max_residual", fit.max_residual},
            {"points_used", fit.points_used},
            {"tail_local_rate", tail}};
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::invalid_argument) throw;
    return nullptr;
  }
}

std::vector<Artifact> run_enumerate(const ExperimentConfig& c) {
  const ProblemModel& model = need_model(c);
  const ActiveSet set = enumerate_active_set(model, need_epsilon(c),
                                             {c.term_budget, true});
  Emitter emit(c, "enumerate");
  std::string csv = emit.csv_preamble("level,u,j,score");
  for (const Term& t : set.terms) {
    csv += join_row({format_count(t.max_coordinate()), format_coordinates(t),
                     format_indices(t), format_real(term_score(model, t))});
  }
  Json levels = Json::array();
  for (const auto& [k, n] : set.level_counts) {
    levels.push_back({{"level", k}, {"count", n}});
  }
  Json body = {{"epsilon", set.epsilon},
               {"eps_sq", set.eps_sq},
               {"m_eps", set.m_eps},
               {"level_counts", levels},
               {"total_terms", set.total_terms},
               {"includes_empty_term", set.includes_empty_term},
               {"largest_excluded_score", set.largest_excluded_score},
               {"worst_case_error", std::sqrt(set.largest_excluded_score)},
               {"cost", algorithm_cost(set, c.cost, c.mode)},
               {"cost_nss", algorithm_cost(set, c.cost, CostMode::nss)},
               {"cost_unrestricted",
                algorithm_cost(set, c.cost, CostMode::unrestricted)}};
  return {emit.csv("active_set", std::move(csv)),
          emit.json("active_set", std::move(body))};
}

std::vector<Artifact> run_curve(const ExperimentConfig& c, unsigned threads,
                                bool with_csv) {
  const auto curve = tradeoff_curve(need_model(c), c.cost, need_grid(c),
                                    threads, c.term_budget);
  Emitter emit(c, with_csv ? "curve" : "rates");
  std::vector<Artifact> out;
  Json body;
  if (with_csv) {
    std::string csv = emit.csv_preamble(
        "epsilon,m_eps,total_terms,cost_nss,cost_unrestricted,exact_error");
    for (const auto& p : curve) {
      csv += join_row({format_real(p.epsilon), format_count(p.m_eps),
                       format_count(p.total_terms), format_real(p.cost_nss),
                       format_real(p.cost_unrestricted),
                       format_real(p.exact_error)});
    }
    out.push_back(emit.csv("curve", std::move(csv)));
    body["points"] = curve.size();
    body["fit"] = fit_json(curve, c.mode);
  } else {
    body["points"] = curve.size();
    body["fit_nss"] = fit_json(curve, CostMode::nss);
    body["fit_unrestricted"] = fit_json(curve, CostMode::unrestricted);
    Json env = Json::array();
    for (const auto& p : lower_envelope(curve, c.mode)) {
      env.push_back({{"epsilon", p.epsilon},
                     {"cost", c.mode == CostMode::nss ? p.cost_nss
                                                      : p.cost_unrestricted},
                     {"exact_error", p.exact_error}});
    }
    body["envelope"] = env;
  }
  const auto b = resolve_bounds(c);
  body["bounds"] = b ? bounds_json(*b) : Json(nullptr);
  out.push_back(emit.json(with_csv ? "curve" : "rates", std::move(body)));
  return out;
}

std::vector<Artifact> run_bounds(const ExperimentConfig& c) {
  const auto b = resolve_bounds(c);
  if (!b) {
    fail(ErrorKind::schema_violation,
         "bounds need a 'bounds' block or a model with claimed decay rates");
  }
  return {Emitter(c, "bounds").json("bounds", bounds_json(*b))};
}

std::vector<Artifact> run_nonanova(const ExperimentConfig& c) {
  const auto r = certified_non_anova_approximation(
      need_model(c), need_epsilon(c), c.cost, c.non_anova_c,
      c.non_anova_rel_tol, {c.term_budget, false});
  Json body = {
      {"c", r.aux.c},
      {"C_gamma", {r.aux.c_gamma.bracket.lo, r.aux.c_gamma.bracket.hi}},
      {"C_gamma_truncation", r.aux.c_gamma.truncation},
      {"nominal_eps", r.nominal_eps},
      {"certified_bound", r.certified_bound.hi},
      {"certified_bound_bracket", {r.certified_bound.lo, r.certified_bound.hi}},
      {"cost_nss", r.cost_nss},
      {"total_terms", r.set.total_terms},
      {"m_eps", r.set.m_eps},
      {"auxiliary_worst_case_error", std::sqrt(r.set.largest_excluded_score)}};
  return {Emitter(c, "nonanova").json("nonanova", std::move(body))};
}

std::vector<Artifact> run_witness(const ExperimentConfig& c) {
  if (!c.witness) fail(ErrorKind::schema_violation, "config has no 'witness' block");
  const ProblemModel& model = need_model(c);
  Emitter emit(c, "witness");
  std::string csv = emit.csv_preamble(
      "budget,L,norm_sq_lo,norm_sq_hi,error_lower_bound,integral_lo,integral_hi");
  std::vector<double> xs, ys;
  for (double n : c.witness->budget_grid) {
    const WitnessBound w =
        witness_lower_bound(model, c.cost, c.witness->h_norm_sq, c.witness->c1, n);
    csv += join_row({format_real(n), format_count(w.L), format_real(w.norm_sq.lo),
                     format_real(w.norm_sq.hi), format_real(w.error_lower_bound),
                     format_real(w.integral.lo), format_real(w.integral.hi)});
    if (w.error_lower_bound > 0.0) {
      xs.push_back(std::log(n));
      ys.push_back(std::log(w.error_lower_bound));
    }
  }
  Json body;
  body["points"] = c.witness->budget_grid.size();
  if (xs.size() >= 2 && xs.front() != xs.back()) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= xs.size();
    my /= xs.size();
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    body["fitted_decay"] = -sxy / sxx;
  } else {
    body["fitted_decay"] = nullptr;
  }
  const auto b = resolve_bounds(c);
  body["theory_decay"] =
      b && std::isfinite(b->d_gamma_up) ? Json((b->d_gamma_up - 1.0) / (2.0 * b->s))
                                        : Json(nullptr);
  return {emit.csv("witness", std::move(csv)), emit.json("witness", std::move(body))};
}

std::vector<Artifact> run_compare(const ExperimentConfig& c) {
  if (!c.compare) fail(ErrorKind::schema_violation, "config has no 'compare' block");
  Emitter emit(c, "compare");
  std::string csv = emit.csv_preamble(
      "d_gamma,d_lambda,s,anova_lower,anova_upper,nonanova_lower,nonanova_upper,"
      "strict_gap");
  for (double dg : c.compare->d_gamma) {
    for (double dl : c.compare->d_lambda) {
      for (double s : c.compare->s) {
        const RateBounds a = anova_rate_bounds(dl, dg, dg, s);
        const RateBounds n = non_anova_rate_bounds(dl, dg, dg, s);
        const ComparisonGap g = comparison_gap(dg, dl, s);
        csv += join_row({format_real(dg), format_real(dl), format_real(s),
                         format_real(a.lower), format_real(a.upper),
                         format_real(n.lower), format_real(n.upper),
                         g.strict ? "true" : "false"});
      }
    }
  }
  return {emit.csv("compare", std::move(csv))};
}

}  // namespace

std::vector<double> geometric_grid(double start, double stop, double factor) {
  if (!(start > 0.0 && start < 1.0) || !(stop > 0.0 && stop <= start) ||
      !(factor > 0.0 && factor < 1.0)) {
    fail(ErrorKind::schema_violation,
         "eps_grid needs 0 < stop <= start < 1 and factor in (0, 1)");
  }
  std::vector<double> out;
  for (int k = 0;; ++k) {
    const double e = start * std::pow(factor, k);
    if (e < stop * (1.0 - 1e-9)) break;
    out.push_back(e);
  }
  return out;
}

ExperimentConfig parse_experiment_config(const Json& j) {
  allow_keys(j, "config",
             {"model", "cost", "mode", "epsilon", "epsilon_sq", "eps_grid",
              "term_budget", "output_prefix", "non_anova", "witness", "bounds",
              "compare"});
  ExperimentConfig c;
  c.source = j;
  if (const Json* m = find(j, "model")) c.model = model_from_json(*m);
  if (const Json* v = find(j, "cost")) c.cost = cost_from_json(*v);
  if (const Json* v = find(j, "mode")) {
    if (!v->is_string()) fail(ErrorKind::schema_violation, "'mode' must be a string");
    c.mode = parse_cost_mode(v->get<std::string>());
  }
  if (j.contains("epsilon") && j.contains("epsilon_sq")) {
    fail(ErrorKind::schema_violation, "give 'epsilon' or 'epsilon_sq', not both");
  }
  if (j.contains("epsilon")) c.epsilon = Threshold(get_number(j, "epsilon", "config"));
  if (j.contains("epsilon_sq")) {
    c.epsilon = Threshold::squared(get_number(j, "epsilon_sq", "config"));
  }
  if (const Json* g = find(j, "eps_grid")) {
    if (g->is_array()) {
      c.eps_grid = get_numbers(*g, "eps_grid");
    } else {
      allow_keys(*g, "eps_grid", {"start", "stop", "factor"});
      c.eps_grid = geometric_grid(get_number(*g, "start", "eps_grid"),
                                  get_number(*g, "stop", "eps_grid"),
                                  get_number(*g, "factor", "eps_grid"));
    }
    check_grid(c.eps_grid);
  }
  if (j.contains("term_budget")) {
    const double b = get_number(j, "term_budget", "config");
    if (!(b >= 1.0) || b != std::floor(b)) {
      fail(ErrorKind::schema_violation, "'term_budget' must be a positive integer");
    }
    c.term_budget = static_cast<Index>(b);
  }
  if (const Json* v = find(j, "output_prefix")) {
    if (!v->is_string()) {
      fail(ErrorKind::schema_violation, "'output_prefix' must be a string");
    }
    c.output_prefix = v->get<std::string>();
    if (c.output_prefix.find('/') != std::string::npos) {
      fail(ErrorKind::schema_violation, "'output_prefix' must not contain '/'");
    }
  }
  if (const Json* v = find(j, "non_anova")) {
    allow_keys(*v, "non_anova", {"c", "rel_tol"});
    if (v->contains("c")) c.non_anova_c = get_number(*v, "c", "non_anova");
    if (v->contains("rel_tol")) {
      c.non_anova_rel_tol = get_number(*v, "rel_tol", "non_anova");
    }
  }
  if (const Json* v = find(j, "witness")) {
    allow_keys(*v, "witness", {"h_norm_sq", "c1", "budget_grid"});
    WitnessInput w;
    w.h_norm_sq = get_number(*v, "h_norm_sq", "witness");
    w.c1 = get_number(*v, "c1", "witness");
    if (!v->contains("budget_grid")) {
      fail(ErrorKind::schema_violation, "witness needs 'budget_grid'");
    }
    w.budget_grid = get_numbers(v->at("budget_grid"), "witness.budget_grid");
    c.witness = std::move(w);
  }
  if (const Json* v = find(j, "bounds")) {
    allow_keys(*v, "bounds", {"d_lambda", "d_gamma", "d_gamma_low", "d_gamma_up", "s"});
    BoundsInput b;
    b.d_lambda = get_number(*v, "d_lambda", "bounds");
    b.s = get_number(*v, "s", "bounds");
    if (v->contains("d_gamma")) {
      if (v->contains("d_gamma_low") || v->contains("d_gamma_up")) {
        fail(ErrorKind::schema_violation,
             "bounds: 'd_gamma' excludes 'd_gamma_low'/'d_gamma_up'");
      }
      b.d_gamma_low = b.d_gamma_up = get_number(*v, "d_gamma", "bounds");
    } else {
      b.d_gamma_low = get_number(*v, "d_gamma_low", "bounds");
      b.d_gamma_up = get_number(*v, "d_gamma_up", "bounds");
    }
    c.bounds = b;
  }
  if (const Json* v = find(j, "compare")) {
    allow_keys(*v, "compare", {"d_gamma", "d_lambda", "s"});
    for (const char* key : {"d_gamma", "d_lambda", "s"}) {
      if (!v->contains(key)) {
        fail(ErrorKind::schema_violation, std::string("compare needs '") + key + "'");
      }
    }
    c.compare = CompareGrid{get_numbers(v->at("d_gamma"), "compare.d_gamma"),
                            get_numbers(v->at("d_lambda"), "compare.d_lambda"),
                            get_numbers(v->at("s"), "compare.s")};
  }
  return c;
}

std::string config_hash(const Json& j) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<Artifact> run_experiment(const std::string& subcommand,
                                     const ExperimentConfig& config,
                                     unsigned threads) {
  if (subcommand == "enumerate") return run_enumerate(config);
  if (subcommand == "curve") return run_curve(config, threads, true);
  if (subcommand == "rates") return run_curve(config, threads, false);
  if (subcommand == "bounds") return run_bounds(config);
  if (subcommand == "nonanova") return run_nonanova(config);
  if (subcommand == "witness") return run_witness(config);
  if (subcommand == "compare") return run_compare(config);
  fail(ErrorKind::invalid_argument, "unknown subcommand '" + subcommand + "'");
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x,
                               std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::schema_violation:
    case ErrorKind::invalid_argument:
    case ErrorKind::invalid_sequence:
      return 2;
    default:
      return 3;
  }
}

}  // namespace nssapprox
