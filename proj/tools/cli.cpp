#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "circense/eval.hpp"
#include "circense/io.hpp"
#include "circense/selection.hpp"
#include "circense/simulate.hpp"

namespace circense::cli {

namespace {

constexpr std::uint64_t kDefaultSeed = 1;

// Usage mistakes and bad data both end with exit 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EstimationFlags {
  std::optional<double> kappa;
  int grid_cap = kDefaultGridCap;
  std::string strategy = "jump";

  void add_to(CLI::App& cmd) {
    cmd.add_option("--kappa", kappa, "Penalty constant; omitted means calibrate from the data")
        ->check(CLI::PositiveNumber);
    cmd.add_option("--grid-cap", grid_cap, "Largest model index m considered")
        ->check(CLI::Range(1, kMaxModel))
        ->capture_default_str();
    cmd.add_option("--strategy", strategy, "Calibration of kappa: jump or slope")
        ->check(CLI::IsMember({"jump", "slope"}))
        ->capture_default_str();
  }

  [[nodiscard]] AdaptiveOptions options() const {
    AdaptiveOptions o;
    o.grid_cap = grid_cap;
    o.kappa = kappa;
    o.calibration.strategy = parse_kappa_strategy(strategy);
    return o;
  }
};

// --seed, then the config file, then CIRCENSE_SEED, then 1.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag,
                           const std::optional<std::uint64_t>& config = std::nullopt) {
  if (flag) return *flag;
  if (config) return *config;
  if (const char* env = std::getenv("CIRCENSE_SEED"); env != nullptr && *env != '\0') {
    std::uint64_t v = 0;
    const char* end = env + std::char_traits<char>::length(env);
    const auto [ptr, ec] = std::from_chars(env, end, v);
    if (ec != std::errc{} || ptr != end) {
      throw InputError(std::string("CIRCENSE_SEED is not an unsigned integer: '") + env + "'");
    }
    return v;
  }
  return kDefaultSeed;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write '" + path + "'");
  return f;
}

// Either --config FILE or --model NAME (with --alpha for the offset scenario).
StudyConfig load_study(const std::string& config, const std::string& model, std::optional<double> alpha) {
  if (!config.empty() && !model.empty()) throw InputError("give either --config or --model, not both");
  if (!config.empty()) return load_study_config(config);
  if (model.empty()) throw InputError("a scenario is required: --config FILE or --model NAME");
  std::ostringstream text;
  text << "model = " << model << '\n';
  if (alpha) text << "alpha = " << format_double(*alpha) << '\n';
  std::istringstream in(text.str());
  return parse_study_config(in);
}

std::string default_trace_path(const std::string& density_path) {
  std::filesystem::path p(density_path);
  const std::string stem = p.stem().string();
  p.replace_filename(stem + ".trace.csv");
  return p.string();
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::optional<AdaptiveFit> fit_or_report(const CensoredSample& sample, const AdaptiveOptions& options,
                                         std::ostream& err) {
  try {
    return estimate_adaptive(sample, options);
  } catch (const EstimationImpossible& e) {
    err << "estimation impossible: " << e.what() << '\n';
    return std::nullopt;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive density estimation for arc-censored circular data", "circense"};
  app.require_subcommand(1);

  // estimate
  auto* estimate = app.add_subcommand("estimate", "Fit the adaptive estimator to a sample CSV");
  std::string est_input, est_output, est_trace;
  int resolution = 1024;
  EstimationFlags est_flags;
  estimate->add_option("--input,-i", est_input, "Sample CSV (delta,x,l,u)")->required();
  estimate->add_option("--output,-o", est_output, "Density grid CSV")->required();
  estimate->add_option("--trace", est_trace, "Selection trace CSV (default: <output>.trace.csv)");
  estimate->add_option("--resolution", resolution, "Grid points on [0, 2pi)")
      ->check(CLI::Range(2, 1 << 24))
      ->capture_default_str();
  est_flags.add_to(*estimate);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Draw a censored sample from a scenario");
  std::string sim_config, sim_model, sim_output;
  std::optional<double> sim_alpha;
  std::size_t sim_n = 0;
  std::optional<std::uint64_t> sim_seed;
  simulate->add_option("--config", sim_config, "Scenario config file");
  simulate->add_option("--model", sim_model, "model1..model4 or offset");
  simulate->add_option("--alpha", sim_alpha, "Censoring arc length for --model offset");
  simulate->add_option("-n,--size", sim_n, "Sample size")->required()->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim_seed, "RNG seed (fallback: CIRCENSE_SEED, then 1)");
  simulate->add_option("--output,-o", sim_output, "Sample CSV")->required();

  // mise
  auto* mise = app.add_subcommand("mise", "Monte Carlo MISE of the adaptive estimator");
  std::string mise_config, mise_model, mise_output;
  std::optional<double> mise_alpha;
  std::optional<std::size_t> mise_reps;
  std::optional<std::uint64_t> mise_seed;
  std::vector<std::size_t> mise_sizes;
  unsigned mise_jobs = 0;
  std::optional<double> mise_kappa;
  std::optional<int> mise_cap;
  std::optional<std::string> mise_strategy;
  mise->add_option("--config", mise_config, "Study config file");
  mise->add_option("--model", mise_model, "model1..model4 or offset");
  mise->add_option("--alpha", mise_alpha, "Censoring arc length for --model offset");
  mise->add_option("-n,--sizes", mise_sizes, "Sample sizes (overrides the config)")->delimiter(',');
  mise->add_option("--replications,-N", mise_reps, "Replications per sample size");
  mise->add_option("--seed", mise_seed, "RNG seed");
  mise->add_option("--jobs,-j", mise_jobs, "Worker threads (0 = all cores)");
  mise->add_option("--kappa", mise_kappa, "Fixed penalty constant")->check(CLI::PositiveNumber);
  mise->add_option("--grid-cap", mise_cap, "Largest model index m")->check(CLI::Range(1, kMaxModel));
  mise->add_option("--strategy", mise_strategy, "jump or slope")->check(CLI::IsMember({"jump", "slope"}));
  mise->add_option("--output,-o", mise_output, "Report CSV");

  // oracle-scan
  auto* scan = app.add_subcommand("oracle-scan", "MISE of every fixed model m");
  std::string scan_config, scan_model, scan_output;
  std::optional<double> scan_alpha;
  std::size_t scan_n = 0;
  std::optional<std::size_t> scan_reps;
  std::optional<std::uint64_t> scan_seed;
  unsigned scan_jobs = 0;
  std::optional<int> scan_cap;
  scan->add_option("--config", scan_config, "Study config file");
  scan->add_option("--model", scan_model, "model1..model4 or offset");
  scan->add_option("--alpha", scan_alpha, "Censoring arc length for --model offset");
  scan->add_option("-n,--size", scan_n, "Sample size")->required();
  scan->add_option("--replications,-N", scan_reps, "Replications");
  scan->add_option("--seed", scan_seed, "RNG seed");
  scan->add_option("--jobs,-j", scan_jobs, "Worker threads (0 = all cores)");
  scan->add_option("--grid-cap", scan_cap, "Largest model index m")->check(CLI::Range(1, kMaxModel));
  scan->add_option("--output,-o", scan_output, "Scan CSV");

  // fit-vonmises
  auto* fitvm = app.add_subcommand("fit-vonmises", "Von Mises summary (mu, k) of the adaptive estimate");
  std::string fit_input;
  EstimationFlags fit_flags;
  fitvm->add_option("--input,-i", fit_input, "Sample CSV (delta,x,l,u)")->required();
  fit_flags.add_to(*fitvm);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (estimate->parsed()) {
      const CensoredSample sample = read_sample_csv(std::filesystem::path(est_input));
      const auto fitted = fit_or_report(sample, est_flags.options(), err);
      if (!fitted) return kExitStatisticalFailure;
      const AdaptiveFit& fit = *fitted;
      {
        auto f = open_output(est_output);
        write_density_grid(fit.estimate, resolution, f);
      }
      {
        auto f = open_output(est_trace.empty() ? default_trace_path(est_output) : est_trace);
        write_selection_trace(fit.trace, f);
      }
      out << "m=" << fit.trace.chosen.m() << " dim=" << fit.trace.chosen.dim()
          << " kappa=" << format_double(fit.trace.kappa) << " (" << to_string(fit.trace.kappa_source)
          << ") truncated=" << (fit.estimate.truncated ? "yes" : "no") << '\n';
      return kExitOk;
    }

    if (simulate->parsed()) {
      const StudyConfig cfg = load_study(sim_config, sim_model, sim_alpha);
      Rng rng(resolve_seed(sim_seed, cfg.seed), 0);
      const CensoredSample sample = generate_sample(cfg.scenario, sim_n, rng);
      auto f = open_output(sim_output);
      write_sample_csv(sample, f);
      out << "wrote " << sim_n << " observations (" << fixed(100.0 * sample.censored_fraction(), 1)
          << "% censored) to " << sim_output << '\n';
      return kExitOk;
    }

    if (mise->parsed()) {
      StudyConfig cfg = load_study(mise_config, mise_model, mise_alpha);
      if (!mise_sizes.empty()) cfg.sample_sizes = mise_sizes;
      if (mise_reps) cfg.replications = *mise_reps;
      if (mise_kappa) cfg.kappa = mise_kappa;
      if (mise_cap) cfg.grid_cap = *mise_cap;
      if (mise_strategy) cfg.strategy = parse_kappa_strategy(*mise_strategy);
      if (cfg.replications < 2) throw InputError("replications must be at least 2");
      if (std::any_of(cfg.sample_sizes.begin(), cfg.sample_sizes.end(), [](std::size_t n) { return n < 4; })) {
        throw InputError("sample sizes must be at least 4");
      }

      MiseOptions mo;
      mo.sample_sizes = cfg.sample_sizes;
      mo.replications = cfg.replications;
      mo.seed = resolve_seed(mise_seed, cfg.seed);
      mo.jobs = mise_jobs;
      AdaptiveOptions ao;
      ao.grid_cap = cfg.grid_cap;
      ao.kappa = cfg.kappa;
      ao.calibration.strategy = cfg.strategy;
      const MiseReport report = run_mise(cfg.scenario, mo, adaptive_estimator(ao));
      print_mise_table(report, out);
      if (!mise_output.empty()) {
        auto f = open_output(mise_output);
        write_mise_csv(report, f);
      }
      return kExitOk;
    }

    if (scan->parsed()) {
      StudyConfig cfg = load_study(scan_config, scan_model, scan_alpha);
      if (scan_reps) cfg.replications = *scan_reps;
      if (scan_cap) cfg.grid_cap = *scan_cap;
      if (cfg.replications < 2) throw InputError("replications must be at least 2");
      const OracleScan result = fixed_m_oracle_scan(cfg.scenario, scan_n, cfg.replications, cfg.grid_cap,
                                                    resolve_seed(scan_seed, cfg.seed), scan_jobs);
      if (scan_output.empty()) {
        write_oracle_scan_csv(result, out);
      } else {
        auto f = open_output(scan_output);
        write_oracle_scan_csv(result, f);
      }
      const auto& best = result.best();
      out << "best fixed m=" << best.m.m() << " mise=" << format_double(best.mise) << '\n';
      return kExitOk;
    }

    if (fitvm->parsed()) {
      const CensoredSample sample = read_sample_csv(std::filesystem::path(fit_input));
      const auto fitted = fit_or_report(sample, fit_flags.options(), err);
      if (!fitted) return kExitStatisticalFailure;
      const AdaptiveFit& fit = *fitted;
      try {
        const VonMisesFit vm = fit_von_mises(fit.estimate);
        if (vm.flat) err << "warning: estimate has no preferred direction; mu is arbitrary\n";
        out << "mu=" << fixed(vm.mu.value(), 6) << " kappa=" << fixed(vm.kappa, 6) << '\n';
      } catch (const NoFitError& e) {
        err << e.what() << '\n';
        return kExitStatisticalFailure;
      }
      return kExitOk;
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const EstimationImpossible& e) {
    err << "estimation impossible: " << e.what() << '\n';
    return kExitStatisticalFailure;
  }
  return kExitInputError;
}

}  // namespace circense::cli
