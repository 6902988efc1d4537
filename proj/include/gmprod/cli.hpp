// Copyright 2026 The gmprod Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Front end of the `gmprod` tool. Kept header-only so the test suites can
// drive every subcommand in-process.
//
// Exit statuses: 0 success, 2 invalid arguments, 3 exact-oracle budget
// exceeded, 1 anything else.

#ifndef GMPROD_CLI_HPP_
#define GMPROD_CLI_HPP_

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gmprod/distinguisher.hpp"
#include "gmprod/moments.hpp"
#include "gmprod/oracle.hpp"

namespace gmprod::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitBudget = 3;

inline constexpr std::uint64_t kDefaultSeed = 1;

enum class Format { json, csv };

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  std::string subcommand;
  std::size_t p = 1;
  std::size_t q = 1;
  std::vector<std::size_t> inner;
  std::size_t trials = 400;
  std::uint64_t seed = kDefaultSeed;
  BoundConstants constants;
  double c = 1.0;  // TV upper-bound constant
  Format format = Format::json;
  std::optional<std::string> output_path;
  bool strict_dims = false;
  // sweep only
  std::size_t d_min = 16;
  std::size_t d_max = 4096;
  std::size_t steps = 9;
  std::size_t r = 2;

  ChainSpec spec() const { return {p, q, inner}; }
  Validation validation() const {
    return strict_dims ? Validation::strict : Validation::structural;
  }
};

inline std::size_t parse_count(const std::string& token, const char* what) {
  if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos) {
    throw UsageError(std::string("malformed ") + what + ": '" + token + "'");
  }
  std::size_t v = 0;
  try {
    v = static_cast<std::size_t>(std::stoull(token));
  } catch (const std::exception&) {
    throw UsageError(std::string(what) + " out of range: '" + token + "'");
  }
  if (v == 0) throw UsageError(std::string(what) + " must be positive");
  return v;
}

/// "d1,d2,..." -> dims; the empty string is the empty list (r = 1).
inline std::vector<std::size_t> parse_inner(const std::string& text) {
  std::vector<std::size_t> dims;
  if (text.empty()) return dims;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) dims.push_back(parse_count(token, "inner dimension"));
  if (text.back() == ',') throw UsageError("malformed inner list: trailing comma");
  return dims;
}

/// "name=value,..." over c, c1..c4, kappa_p, kappa_q.
inline void parse_constants(const std::string& text, RunConfig& cfg) {
  if (text.empty()) return;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("malformed constant '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string val = item.substr(eq + 1);
    double v = 0.0;
    std::size_t used = 0;
    try {
      v = std::stod(val, &used);
    } catch (const std::exception&) {
      throw UsageError("malformed value for constant '" + key + "'");
    }
    if (used != val.size()) throw UsageError("malformed value for constant '" + key + "'");
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw UsageError("constant '" + key + "' must be positive and finite");
    }
    if (key == "c") cfg.c = v;
    else if (key == "c1") cfg.constants.c1 = v;
    else if (key == "c2") cfg.constants.c2 = v;
    else if (key == "c3") cfg.constants.c3 = v;
    else if (key == "c4") cfg.constants.c4 = v;
    else if (key == "kappa_p") cfg.constants.kappa_p = v;
    else if (key == "kappa_q") cfg.constants.kappa_q = v;
    else throw UsageError("unknown constant '" + key + "'");
  }
}

inline std::uint64_t seed_from_environment() {
  const char* env = std::getenv("GMPROD_SEED");
  if (env == nullptr || *env == '\0') return kDefaultSeed;
  const std::string text(env);
  if (text.find_first_not_of("0123456789") != std::string::npos) {
    throw UsageError("GMPROD_SEED is not an unsigned integer");
  }
  try {
    return std::stoull(text);
  } catch (const std::exception&) {
    throw UsageError("GMPROD_SEED out of range");
  }
}

/// %.17g
inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char ch : s) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + "\"";
}

inline std::string join_dims(const std::vector<std::size_t>& dims) {
  std::string out;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(dims[i]);
  }
  return out;
}

using Json = nlohmann::ordered_json;

/// Canonical JSON text: two-space indent, trailing newline.
inline std::string write_json(const Json& j) { return j.dump(2) + "\n"; }

/// Header line plus data rows; every cell already rendered.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string str() const {
    std::string out;
    auto emit = [&out](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += csv_field(cells[i]);
      }
      out += '\n';
    };
    emit(header);
    for (const auto& row : rows) emit(row);
    return out;
  }
};

/// Cell for an optional real: empty when absent.
inline std::string real_cell(const std::optional<double>& x) {
  return x ? format_real(*x) : std::string();
}

inline Json optional_json(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

inline Json constants_json(const RunConfig& cfg) {
  Json j;
  j["c"] = cfg.c;
  j["c1"] = cfg.constants.c1;
  j["c2"] = cfg.constants.c2;
  j["c3"] = cfg.constants.c3;
  j["c4"] = cfg.constants.c4;
  j["kappa_p"] = cfg.constants.kappa_p;
  j["kappa_q"] = cfg.constants.kappa_q;
  return j;
}

inline std::string cmd_moments(const RunConfig& cfg) {
  const ChainSpec spec = cfg.spec();
  spec.validate(cfg.validation());
  const bool chained = spec.r() >= 2;

  const Rational exact_mean = mean_h_product_exact(spec);
  const auto s = closed_form_moments<BigInt>(spec.inner);
  const BigInt var_unnorm = variance_single_exact<BigInt>(spec.p, spec.q);
  std::optional<double> mean_asym, mean_single, var_single, var_bound;
  if (chained) {
    mean_asym = mean_h_asymptotic(spec);
    mean_single = mean_h_single(spec.p, spec.q, spec.d1());
    var_single = to_double(Rational(var_unnorm, BigInt(spec.d1()) * spec.d1() * spec.d1() * spec.d1()));
    var_bound = variance_bound_product(spec, cfg.constants);
  }
  const double mean_prod = to_double(exact_mean);

  if (cfg.format == Format::csv) {
    CsvTable t;
    t.header = {"p", "q", "inner", "r", "mean_product", "mean_product_exact", "mean_asymptotic",
                "mean_single", "var_single", "var_single_unnormalized", "var_product_bound",
                "s1", "s2", "s3", "s4", "s5", "s6"};
    t.rows.push_back({std::to_string(spec.p), std::to_string(spec.q), join_dims(spec.inner),
                      std::to_string(spec.r()), format_real(mean_prod), to_string(exact_mean),
                      real_cell(mean_asym), real_cell(mean_single), real_cell(var_single),
                      var_unnorm.str(), real_cell(var_bound), s.s1.str(), s.s2.str(),
                      s.s3.str(), s.s4.str(), s.s5.str(), s.s6.str()});
    return t.str();
  }
  Json j;
  j["command"] = "moments";
  j["p"] = spec.p;
  j["q"] = spec.q;
  j["inner"] = spec.inner;
  j["r"] = spec.r();
  j["mean_product"] = mean_prod;
  j["mean_product_exact"] = to_string(exact_mean);
  j["mean_asymptotic"] = optional_json(mean_asym);
  j["mean_single"] = optional_json(mean_single);
  j["var_single"] = optional_json(var_single);
  j["var_single_unnormalized"] = var_unnorm.str();
  j["var_product_bound"] = optional_json(var_bound);
  j["constants"] = constants_json(cfg);
  j["s_vector"] = {{"s1", s.s1.str()}, {"s2", s.s2.str()}, {"s3", s.s3.str()},
                   {"s4", s.s4.str()}, {"s5", s.s5.str()}, {"s6", s.s6.str()}};
  return write_json(j);
}

inline std::string cmd_distinguish(const RunConfig& cfg) {
  const ChainSpec spec = cfg.spec();
  spec.validate(cfg.validation());
  if (spec.r() < 2) throw UsageError("distinguish needs at least one inner dimension");
  if (cfg.trials < 10) throw UsageError("distinguish needs --trials >= 10");

  const TestPlan plan = build_test(spec, cfg.constants);
  const HSamples samples = draw_h_samples(spec, cfg.trials, SeedSpec{cfg.seed, 0});
  const PowerReport report = power_from_samples(samples, plan);
  const double tv_low = tv_lower_bound_empirical(samples.single, samples.product);
  const double tv_up = tv_upper_bound(spec, cfg.c);

  if (cfg.format == Format::csv) {
    CsvTable t;
    t.header = {"p", "q", "inner", "r", "trials", "seed", "threshold", "mu_single",
                "mu_product", "mean_gap", "accuracy", "false_positive_rate",
                "false_negative_rate", "chebyshev_error", "tv_lower_empirical", "tv_upper"};
    t.rows.push_back({std::to_string(spec.p), std::to_string(spec.q), join_dims(spec.inner),
                      std::to_string(spec.r()), std::to_string(cfg.trials),
                      std::to_string(cfg.seed), format_real(plan.threshold),
                      format_real(plan.mu_single), format_real(plan.mu_product),
                      format_real(plan.gap()), format_real(report.accuracy),
                      format_real(report.false_positive_rate),
                      format_real(report.false_negative_rate),
                      format_real(report.chebyshev_error_bound), format_real(tv_low),
                      format_real(tv_up)});
    return t.str();
  }
  Json j;
  j["command"] = "distinguish";
  j["p"] = spec.p;
  j["q"] = spec.q;
  j["inner"] = spec.inner;
  j["r"] = spec.r();
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["threshold"] = plan.threshold;
  j["mu_single"] = plan.mu_single;
  j["mu_product"] = plan.mu_product;
  j["mean_gap"] = plan.gap();
  j["var_single"] = plan.var_single;
  j["var_product_bound"] = plan.var_product_bound;
  j["accuracy"] = report.accuracy;
  j["false_positive_rate"] = report.false_positive_rate;
  j["false_negative_rate"] = report.false_negative_rate;
  j["chebyshev_error"] = report.chebyshev_error_bound;
  j["tv_lower_empirical"] = tv_low;
  j["tv_upper"] = tv_up;
  j["constants"] = constants_json(cfg);
  return write_json(j);
}

/// `steps` geometrically spaced integers from d_min to d_max inclusive.
inline std::vector<std::size_t> geometric_grid(std::size_t d_min, std::size_t d_max,
                                               std::size_t steps) {
  if (d_min == 0 || d_min > d_max) throw UsageError("sweep needs 0 < d-min <= d-max");
  if (steps < 2) throw UsageError("sweep needs --steps >= 2");
  std::vector<std::size_t> grid(steps);
  const double lo = std::log(static_cast<double>(d_min));
  const double hi = std::log(static_cast<double>(d_max));
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(steps - 1);
    grid[k] = static_cast<std::size_t>(std::llround(std::exp(lo + t * (hi - lo))));
  }
  grid.front() = d_min;
  grid.back() = d_max;
  return grid;
}

struct SweepRow {
  std::size_t d = 0;
  double accuracy = 0.0;
  double tv_lower_empirical = 0.0;
  double tv_upper_c1 = 0.0;
  double chebyshev_error = 0.0;
  double mean_gap = 0.0;
};

/// Every row reuses the configured seed, so the A_1 draws are common
/// random numbers across rows.
inline std::vector<SweepRow> run_sweep(const RunConfig& cfg) {
  if (cfg.r < 2) throw UsageError("sweep needs --r >= 2");
  if (cfg.trials < 10) throw UsageError("sweep needs --trials >= 10");
  std::vector<SweepRow> rows;
  for (std::size_t d : geometric_grid(cfg.d_min, cfg.d_max, cfg.steps)) {
    const ChainSpec spec{cfg.p, cfg.q, std::vector<std::size_t>(cfg.r - 1, d)};
    spec.validate(cfg.validation());
    const TestPlan plan = build_test(spec, cfg.constants);
    const HSamples samples = draw_h_samples(spec, cfg.trials, SeedSpec{cfg.seed, 0});
    const PowerReport report = power_from_samples(samples, plan);
    rows.push_back({d, report.accuracy, tv_lower_bound_empirical(samples.single, samples.product),
                    tv_upper_bound(spec, cfg.c), report.chebyshev_error_bound, plan.gap()});
  }
  return rows;
}

inline std::string cmd_sweep(const RunConfig& cfg) {
  const auto rows = run_sweep(cfg);
  if (cfg.format == Format::csv) {
    CsvTable t;
    t.header = {"d", "accuracy", "tv_lower_empirical", "tv_upper_c1", "chebyshev_error",
                "mean_gap"};
    for (const auto& r : rows) {
      t.rows.push_back({std::to_string(r.d), format_real(r.accuracy),
                        format_real(r.tv_lower_empirical), format_real(r.tv_upper_c1),
                        format_real(r.chebyshev_error), format_real(r.mean_gap)});
    }
    return t.str();
  }
  Json j;
  j["command"] = "sweep";
  j["p"] = cfg.p;
  j["q"] = cfg.q;
  j["r"] = cfg.r;
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["constants"] = constants_json(cfg);
  Json arr = Json::array();
  for (const auto& r : rows) {
    Json row;
    row["d"] = r.d;
    row["accuracy"] = r.accuracy;
    row["tv_lower_empirical"] = r.tv_lower_empirical;
    row["tv_upper_c1"] = r.tv_upper_c1;
    row["chebyshev_error"] = r.chebyshev_error;
    row["mean_gap"] = r.mean_gap;
    arr.push_back(std::move(row));
  }
  j["rows"] = std::move(arr);
  return write_json(j);
}

inline std::string cmd_oracle(const RunConfig& cfg) {
  const ChainSpec spec = cfg.spec();
  spec.validate(cfg.validation());
  if (spec.r() > 2) throw OracleBudgetError("exact oracle supports r <= 2 only");

  const Rational wick_mean = wick_exact_mean_h(spec.p, spec.q, spec.inner);
  const Rational closed_mean = mean_h_product_exact(spec);
  std::optional<Rational> wick_var, closed_var;
  if (spec.r() == 1) {
    wick_var = wick_exact_var_h_single(spec.p, spec.q);
    closed_var = Rational(variance_single_exact<BigInt>(spec.p, spec.q));
  }

  if (cfg.format == Format::csv) {
    CsvTable t;
    t.header = {"quantity", "wick", "closed_form", "closed_form_value", "equal"};
    t.rows.push_back({"mean_h", to_string(wick_mean), to_string(closed_mean),
                      format_real(to_double(closed_mean)),
                      wick_mean == closed_mean ? "true" : "false"});
    if (wick_var) {
      t.rows.push_back({"var_h_single", to_string(*wick_var), to_string(*closed_var),
                        format_real(to_double(*closed_var)),
                        *wick_var == *closed_var ? "true" : "false"});
    }
    return t.str();
  }
  Json j;
  j["command"] = "oracle";
  j["p"] = spec.p;
  j["q"] = spec.q;
  j["inner"] = spec.inner;
  j["r"] = spec.r();
  j["wick_mean"] = to_string(wick_mean);
  j["closed_form_mean"] = to_double(closed_mean);
  j["closed_form_mean_exact"] = to_string(closed_mean);
  j["mean_equal"] = wick_mean == closed_mean;
  if (wick_var) {
    j["wick_var_single"] = to_string(*wick_var);
    j["closed_form_var_single"] = to_double(*closed_var);
    j["closed_form_var_single_exact"] = to_string(*closed_var);
    j["var_equal"] = *wick_var == *closed_var;
  }
  return write_json(j);
}

/// Parses argv, runs one subcommand and writes its report to --out or `out`.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"gmprod: products of Gaussian matrices versus a single Gaussian"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string inner_text;
  std::string constants_text;
  std::string format_text = "json";
  std::string out_path;
  std::optional<std::uint64_t> seed_flag;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--p", cfg.p, "rows of the product (d_0)")->check(CLI::PositiveNumber);
    sub->add_option("--q", cfg.q, "columns of the product (d_r)")->check(CLI::PositiveNumber);
    sub->add_option("--trials", cfg.trials, "trials per ensemble")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed_flag, "master seed (default: $GMPROD_SEED, else 1)");
    sub->add_option("--constants", constants_text, "k=v,... over c,c1..c4,kappa_p,kappa_q");
    sub->add_option("--format", format_text, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", out_path, "write the report to this path");
    sub->add_flag("--strict-dims", cfg.strict_dims, "require every d_i >= max(p, q)");
  };

  auto* moments = app.add_subcommand("moments", "analytic moments and bounds");
  auto* distinguish = app.add_subcommand("distinguish", "run the threshold test");
  auto* sweep = app.add_subcommand("sweep", "accuracy and TV bounds over a d grid");
  auto* oracle = app.add_subcommand("oracle", "exact Wick values next to closed forms");
  for (auto* sub : {moments, distinguish, oracle}) {
    add_common(sub);
    sub->add_option("--inner", inner_text, "inner dimensions d1,d2,...");
  }
  add_common(sweep);
  sweep->add_option("--r", cfg.r, "number of factors")->check(CLI::PositiveNumber);
  sweep->add_option("--d-min", cfg.d_min, "smallest inner dimension")->check(CLI::PositiveNumber);
  sweep->add_option("--d-max", cfg.d_max, "largest inner dimension")->check(CLI::PositiveNumber);
  sweep->add_option("--steps", cfg.steps, "grid points")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "gmprod: " << e.what() << "\n";
    return kExitInvalid;
  }

  try {
    CLI::App* chosen = app.get_subcommands().front();
    cfg.subcommand = chosen->get_name();
    if (cfg.subcommand == "sweep" && chosen->count("--format") == 0) format_text = "csv";
    cfg.format = format_text == "csv" ? Format::csv : Format::json;
    cfg.inner = parse_inner(inner_text);
    parse_constants(constants_text, cfg);
    cfg.seed = seed_flag ? *seed_flag : seed_from_environment();
    if (!out_path.empty()) cfg.output_path = out_path;

    std::string body;
    if (cfg.subcommand == "moments") body = cmd_moments(cfg);
    else if (cfg.subcommand == "distinguish") body = cmd_distinguish(cfg);
    else if (cfg.subcommand == "sweep") body = cmd_sweep(cfg);
    else body = cmd_oracle(cfg);

    if (cfg.output_path) {
      std::ofstream file(*cfg.output_path, std::ios::binary | std::ios::trunc);
      if (!file) {
        err << "gmprod: cannot open " << *cfg.output_path << "\n";
        return kExitFailure;
      }
      file << body;
    } else {
      out << body;
    }
    return kExitOk;
  } catch (const OracleBudgetError& e) {
    err << "gmprod: " << e.what() << "\n";
    return kExitBudget;
  } catch (const std::invalid_argument& e) {
    err << "gmprod: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "gmprod: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace gmprod::cli

#endif  // GMPROD_CLI_HPP_
