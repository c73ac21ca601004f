// Command-line front end: hypothesis tests on CSV data, confidence-set scans
// over a parameter grid, the Monte Carlo simulation harness, and the power
// diagnostics heat map. Configuration comes from a single JSON document with
// flag overrides; rerunning any command with the same config and seed
// reproduces every output file byte for byte.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mineq/mineq.hpp"
#include "mineq/report_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  json cfg;
  in >> cfg;
  if (!cfg.is_object()) throw std::invalid_argument("config root must be a JSON object");
  return cfg;
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
  std::cerr << "mineq: wrote " << path.string() << "\n";
}

mineq::ErrorLaw parse_error_law(const std::string& token) {
  if (token == "t4") return mineq::ErrorLaw::t4_scaled;
  if (token == "uniform") return mineq::ErrorLaw::uniform_sym;
  throw std::invalid_argument("unknown error law '" + token + "' (expected t4 or uniform)");
}

mineq::LambdaMcExponent parse_exponent(const std::string& token) {
  if (token == "half") return mineq::LambdaMcExponent::half;
  if (token == "one") return mineq::LambdaMcExponent::one;
  throw std::invalid_argument("unknown lambda_mc_exponent '" + token + "' (expected half or one)");
}

// Expands method tokens against the tuning grids; "all" yields the full
// battery of eleven methods.
std::vector<mineq::MethodSpec> expand_methods(const std::vector<std::string>& tokens, double alpha,
                                              int draws, const std::vector<double>& lasso_c,
                                              const std::vector<double>& beta_ns,
                                              mineq::LambdaMcExponent exponent) {
  using mineq::MethodId;
  std::vector<MethodId> ids;
  for (const auto& token : tokens) {
    if (token == "all") {
      for (MethodId id : {MethodId::sn_lasso, MethodId::mb_lasso, MethodId::eb_lasso,
                          MethodId::sn_1s, MethodId::sn_2s, MethodId::mb_1s, MethodId::mb_h,
                          MethodId::mb_2s, MethodId::eb_1s, MethodId::eb_h, MethodId::eb_2s}) {
        ids.push_back(id);
      }
      continue;
    }
    const auto id = mineq::parse_method_id(token);
    if (!id) throw std::invalid_argument("unknown method '" + token + "'");
    ids.push_back(*id);
  }
  std::vector<mineq::MethodSpec> specs;
  auto add = [&](mineq::MethodSpec spec) {
    spec.validate();
    const std::string label = spec.label();
    for (const auto& existing : specs) {
      if (existing.label() == label) return;
    }
    specs.push_back(std::move(spec));
  };
  for (MethodId id : ids) {
    mineq::MethodSpec base;
    base.id = id;
    base.alpha = alpha;
    if (base.uses_bootstrap()) base.draws = draws;
    if (base.is_lasso()) {
      for (double c : lasso_c) {
        mineq::MethodSpec spec = base;
        mineq::PenaltySpec penalty;
        penalty.mode = mineq::PenaltyMode::monte_carlo;
        penalty.c_factor = c;
        penalty.mc_exponent = exponent;
        spec.penalty = penalty;
        add(std::move(spec));
      }
    } else if (base.needs_beta()) {
      for (double b : beta_ns) {
        mineq::MethodSpec spec = base;
        spec.beta_n = b;
        add(std::move(spec));
      }
    } else {
      add(std::move(base));
    }
  }
  return specs;
}

// Builds the single method used by `test` and `confset`.
mineq::MethodSpec build_single_method(const std::string& token, double alpha, int draws,
                                      std::optional<double> beta_n, double lasso_c,
                                      mineq::LambdaMcExponent exponent, std::uint64_t seed) {
  const auto id = mineq::parse_method_id(token);
  if (!id) throw std::invalid_argument("unknown method '" + token + "'");
  mineq::MethodSpec spec;
  spec.id = *id;
  spec.alpha = alpha;
  spec.seed = seed;
  if (spec.uses_bootstrap()) spec.draws = draws;
  if (spec.is_lasso()) {
    mineq::PenaltySpec penalty;
    penalty.mode = mineq::PenaltyMode::monte_carlo;
    penalty.c_factor = lasso_c;
    penalty.mc_exponent = exponent;
    spec.penalty = penalty;
  }
  if (spec.needs_beta()) {
    if (!beta_n) throw std::invalid_argument(token + " requires beta_n");
    spec.beta_n = beta_n;
  }
  spec.validate();
  return spec;
}

struct CommonOptions {
  std::string config_path;
  std::string out_dir = "out";
  std::string profile = "desk";
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 1;
};

std::uint64_t require_seed(const CommonOptions& opts, const json& cfg, const char* why) {
  if (opts.seed_given) return opts.seed;
  if (cfg.contains("seed")) return cfg["seed"].get<std::uint64_t>();
  throw std::invalid_argument(std::string("a seed is mandatory for ") + why +
                              " (--seed or config \"seed\")");
}

int run_test(const CommonOptions& opts, const json& root, std::string data_flag, int p_flag,
             std::string method_flag) {
  json cfg = root.value("test", json::object());
  const std::string data = !data_flag.empty() ? data_flag : cfg.value("data", std::string());
  if (data.empty()) throw std::invalid_argument("test: a data CSV is required (--data)");
  const int p = p_flag >= 0 ? p_flag : cfg.value("p", -1);
  if (p < 0) throw std::invalid_argument("test: the inequality count p is required (--p)");
  const std::string method = !method_flag.empty() ? method_flag : cfg.value("method", "SN-1S");
  const double alpha = cfg.value("alpha", 0.05);
  const int draws = cfg.value("B", 1000);
  std::optional<double> beta_n;
  if (cfg.contains("beta_n")) beta_n = cfg["beta_n"].get<double>();
  const double lasso_c = cfg.value("C", 2.0);
  const auto exponent = parse_exponent(cfg.value("lambda_mc_exponent", "half"));

  mineq::MethodSpec probe;
  const auto id = mineq::parse_method_id(method);
  if (!id) throw std::invalid_argument("unknown method '" + method + "'");
  probe.id = *id;
  const std::uint64_t seed =
      probe.uses_bootstrap() ? require_seed(opts, root, "bootstrap tests") : (opts.seed_given ? opts.seed : root.value("seed", std::uint64_t{0}));

  const auto spec = build_single_method(method, alpha, draws, beta_n, lasso_c, exponent, seed);
  const auto sample = mineq::SampleMatrix::from_csv(data, p);
  const auto outcome = mineq::run_method(spec, sample);
  const std::string text = mineq::to_json(outcome).dump(2) + "\n";
  std::cout << text;
  write_file(fs::path(opts.out_dir) / "test_outcome.json", text);
  return 0;
}

int run_confset(const CommonOptions& opts, const json& root) {
  json cfg = root.value("confset", json::object());
  if (!cfg.contains("grid") || !cfg["grid"].is_array() || cfg["grid"].empty()) {
    throw std::invalid_argument("confset: config needs a nonempty \"grid\" array");
  }
  const int p = cfg.value("p", -1);
  if (p < 0) throw std::invalid_argument("confset: the inequality count p is required");
  const std::string method = cfg.value("method", "SN-1S");
  const double alpha = cfg.value("alpha", 0.05);
  const int draws = cfg.value("B", 1000);
  std::optional<double> beta_n;
  if (cfg.contains("beta_n")) beta_n = cfg["beta_n"].get<double>();
  const double lasso_c = cfg.value("C", 2.0);
  const auto exponent = parse_exponent(cfg.value("lambda_mc_exponent", "half"));

  mineq::MethodSpec probe;
  const auto id = mineq::parse_method_id(method);
  if (!id) throw std::invalid_argument("unknown method '" + method + "'");
  probe.id = *id;
  const std::uint64_t seed = probe.uses_bootstrap()
                                 ? require_seed(opts, root, "bootstrap confidence sets")
                                 : (opts.seed_given ? opts.seed : root.value("seed", std::uint64_t{0}));
  const auto spec = build_single_method(method, alpha, draws, beta_n, lasso_c, exponent, seed);

  const fs::path base_dir =
      opts.config_path.empty() ? fs::path(".") : fs::path(opts.config_path).parent_path();
  std::vector<mineq::GridPoint> grid;
  for (const auto& entry : cfg["grid"]) {
    const std::string label = entry.value("label", "theta" + std::to_string(grid.size()));
    fs::path data = entry.value("data", std::string());
    if (data.empty()) throw std::invalid_argument("confset: grid entry missing \"data\"");
    if (data.is_relative()) data = base_dir / data;
    grid.push_back(mineq::GridPoint{
        label, [data, p]() { return mineq::SampleMatrix::from_csv(data.string(), p); }});
  }
  const auto result = mineq::confidence_set(spec, grid, seed, opts.threads);
  write_file(fs::path(opts.out_dir) / "confset.csv", mineq::to_csv(result));
  std::cerr << "mineq: " << result.retained_labels.size() << "/" << grid.size()
            << " grid points retained\n";
  return 0;
}

int run_simulate(const CommonOptions& opts, const json& root) {
  json cfg = root.value("simulate", json::object());
  const bool paper = opts.profile == "paper";

  std::vector<int> designs = paper ? std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14}
                                   : std::vector<int>{3};
  std::vector<int> p_values = paper ? std::vector<int>{200, 500, 1000} : std::vector<int>{200};
  std::vector<double> rhos = paper ? std::vector<double>{0.0, 0.5, 0.9} : std::vector<double>{0.0};
  std::vector<std::string> laws =
      paper ? std::vector<std::string>{"t4", "uniform"} : std::vector<std::string>{"t4"};
  int replications = paper ? 2000 : 500;
  int draws = paper ? 1000 : 300;
  int n = 400;
  double alpha = 0.05;
  std::vector<std::string> methods{"all"};
  std::vector<double> lasso_c{2.0, 4.0, 6.0};
  std::vector<double> beta_ns{0.0001, 0.001, 0.01};
  std::string exponent = "half";

  if (cfg.contains("designs")) designs = cfg["designs"].get<std::vector<int>>();
  if (cfg.contains("p")) p_values = cfg["p"].get<std::vector<int>>();
  if (cfg.contains("rho")) rhos = cfg["rho"].get<std::vector<double>>();
  if (cfg.contains("error_laws")) laws = cfg["error_laws"].get<std::vector<std::string>>();
  if (cfg.contains("R")) replications = cfg["R"].get<int>();
  if (cfg.contains("B")) draws = cfg["B"].get<int>();
  if (cfg.contains("n")) n = cfg["n"].get<int>();
  if (cfg.contains("alpha")) alpha = cfg["alpha"].get<double>();
  if (cfg.contains("methods")) methods = cfg["methods"].get<std::vector<std::string>>();
  if (cfg.contains("lasso_C")) lasso_c = cfg["lasso_C"].get<std::vector<double>>();
  if (cfg.contains("beta_n")) beta_ns = cfg["beta_n"].get<std::vector<double>>();
  if (cfg.contains("lambda_mc_exponent")) exponent = cfg["lambda_mc_exponent"].get<std::string>();

  std::vector<mineq::DesignSpec> design_specs;
  for (int d : designs) {
    for (int p : p_values) {
      for (double rho : rhos) {
        for (const auto& law : laws) {
          auto spec = mineq::DesignSpec::make(d, p, rho, parse_error_law(law), n);
          mineq::validate_sigma_params(spec.sigma_kind, spec.p, spec.rho);
          design_specs.push_back(spec);
        }
      }
    }
  }

  mineq::MonteCarloConfig mc;
  mc.replications = replications;
  mc.methods = expand_methods(methods, alpha, draws, lasso_c, beta_ns, parse_exponent(exponent));
  mc.seed = require_seed(opts, root, "simulate");
  mc.threads = opts.threads;

  const auto report = mineq::run_monte_carlo(mc, design_specs);
  write_file(fs::path(opts.out_dir) / "simulate_rejections.csv", report.rejection_csv());
  write_file(fs::path(opts.out_dir) / "simulate_retained.csv", report.retained_csv());
  write_file(fs::path(opts.out_dir) / "simulate_report.json", mineq::to_json(report).dump(2) + "\n");
  std::cerr << "mineq: simulate finished in " << report.wall_seconds << " s (" << report.cells.size()
            << " cells x " << report.replications << " replications)\n";
  return 0;
}

int run_diagnose(const CommonOptions& opts, const json& root) {
  json cfg = root.value("diagnose", json::object());
  const int n = cfg.value("n", 400);
  const double beta_n = cfg.value("beta_n", 0.001);
  const double c_factor = cfg.value("C", 2.0);
  const double delta = cfg.value("delta", 1.0);
  const double m_min = cfg.value("M_min", 0.0);
  const double m_max = cfg.value("M_max", 10.0);
  const int m_steps = cfg.value("M_steps", 101);
  const int p_min = cfg.value("p_min", 1);
  const int p_max = cfg.value("p_max", 1000);
  const int p_steps = cfg.value("p_steps", 1000);
  const auto grid =
      mineq::heatmap_grid(n, beta_n, c_factor, delta, m_min, m_max, m_steps, p_min, p_max, p_steps);
  write_file(fs::path(opts.out_dir) / "diagnose_heatmap.csv", grid.to_csv());
  std::cerr << "mineq: diagnose grid " << grid.p_values.size() << " x " << grid.M_values.size()
            << ", highlevel fail fraction " << grid.highlevel_fail_fraction() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mineq: inference for models with many moment (in)equalities"};
  app.require_subcommand(1);
  app.fallthrough();

  CommonOptions opts;
  app.add_option("--config", opts.config_path, "JSON config file");
  auto* seed_opt = app.add_option("--seed", opts.seed, "global RNG seed (64-bit)");
  auto* out_opt = app.add_option("--out", opts.out_dir, "output directory (default: out)");
  auto* threads_opt = app.add_option("--threads", opts.threads, "worker thread count (default: 1)");
  auto* profile_opt = app.add_option("--profile", opts.profile, "scale profile (default: desk)")
                          ->check(CLI::IsMember({"desk", "paper"}));

  auto* c_test = app.add_subcommand("test", "run one hypothesis test on a CSV sample");
  std::string data_flag;
  int p_flag = -1;
  std::string method_flag;
  c_test->add_option("--data", data_flag, "CSV file (rows = observations)");
  c_test->add_option("--p", p_flag, "number of inequality coordinates (leading columns)");
  c_test->add_option("--method", method_flag, "method id, e.g. SN-1S or MB-Lasso");

  auto* c_confset = app.add_subcommand("confset", "confidence set by test inversion over a grid");
  auto* c_sim = app.add_subcommand("simulate", "Monte Carlo rejection and selection tables");
  auto* c_diag = app.add_subcommand("diagnose", "power-comparison condition heat map");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  opts.seed_given = seed_opt->count() > 0;

  try {
    const json root = load_config(opts.config_path);
    // flags win over config fields, config fields over defaults
    if (threads_opt->count() == 0 && root.contains("threads")) {
      opts.threads = root["threads"].get<int>();
    }
    if (out_opt->count() == 0 && root.contains("out")) {
      opts.out_dir = root["out"].get<std::string>();
    }
    if (profile_opt->count() == 0 && root.contains("profile")) {
      opts.profile = root["profile"].get<std::string>();
      if (opts.profile != "desk" && opts.profile != "paper") {
        throw std::invalid_argument("unknown profile '" + opts.profile + "'");
      }
    }
    if (c_test->parsed()) return run_test(opts, root, data_flag, p_flag, method_flag);
    if (c_confset->parsed()) return run_confset(opts, root);
    if (c_sim->parsed()) return run_simulate(opts, root);
    if (c_diag->parsed()) return run_diagnose(opts, root);
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "mineq: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "mineq: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "mineq: config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "mineq: error: " << e.what() << "\n";
    return 1;
  }
}
