#include "circense/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "circense/special.hpp"

namespace circense {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Mean and standard error of the finite entries.
std::pair<double, double> summarize(const std::vector<double>& values) {
  std::vector<double> ok;
  for (double v : values) {
    if (std::isfinite(v)) ok.push_back(v);
  }
  if (ok.empty()) return {kNaN, kNaN};
  const double mean = stable_mean(ok);
  if (ok.size() < 2) return {mean, kNaN};
  std::vector<double> sq;
  sq.reserve(ok.size());
  for (double v : ok) sq.push_back((v - mean) * (v - mean));
  const double k = static_cast<double>(ok.size());
  const double var = stable_mean(sq) * k / (k - 1.0);
  return {mean, std::sqrt(var / k)};
}

}  // namespace

double trapezoid(const std::function<double(double)>& g, int nodes) {
  if (nodes < 2) throw std::invalid_argument("trapezoid needs at least two nodes");
  const double h = kTwoPi / nodes;
  double sum = 0.0;
  for (int i = 0; i < nodes; ++i) sum += g(h * i);
  return sum * h;
}

double integrated_squared_error(const std::function<double(double)>& estimate,
                                const CircularDistribution& truth) {
  return trapezoid([&](double x) {
    const double d = estimate(x) - truth.density(Angle{x});
    return d * d;
  });
}

double integrated_squared_error(const DensityEstimate& est, const CircularDistribution& truth) {
  return integrated_squared_error([&](double x) { return evaluate_density(est, Angle{x}); }, truth);
}

double stable_mean(std::vector<double> values) {
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  double comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  return (sum + comp) / static_cast<double>(values.size());
}

Estimator adaptive_estimator(AdaptiveOptions options) {
  return [options](const CensoredSample& sample) {
    auto fit = estimate_adaptive(sample, options);
    const int dim = fit.trace.chosen.dim();
    return ReplicationFit{[est = std::move(fit.estimate)](double x) {
                            return evaluate_density(est, Angle{x});
                          },
                          dim};
  };
}

std::uint64_t replication_stream(std::size_t n, std::size_t rep) {
  return (static_cast<std::uint64_t>(n) << 32) | static_cast<std::uint64_t>(rep);
}

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& body) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> workers;
    workers.reserve(jobs);
    for (unsigned w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            const std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

MiseReport run_mise(const ScenarioSpec& spec, const MiseOptions& options, const Estimator& estimator) {
  if (options.replications < 2) throw DomainError("run_mise needs at least 2 replications");
  if (options.sample_sizes.empty()) throw DomainError("run_mise needs at least one sample size");

  MiseReport report{spec.name, {}};
  for (const std::size_t n : options.sample_sizes) {
    const std::size_t reps = options.replications;
    std::vector<double> ise(reps, kNaN);
    std::vector<double> cens(reps, kNaN);
    std::vector<double> dims(reps, kNaN);
    parallel_for(reps, options.jobs, [&](std::size_t r) {
      Rng rng(options.seed, replication_stream(n, r));
      const CensoredSample sample = generate_sample(spec, n, rng);
      cens[r] = sample.censored_fraction();
      try {
        const ReplicationFit fit = estimator(sample);
        ise[r] = integrated_squared_error(fit.density, spec.target);
        dims[r] = fit.dimension;
      } catch (const EstimationImpossible&) {
        // counted below
      }
    });

    MiseRow row;
    row.n = n;
    row.replications = reps;
    row.failures = static_cast<std::size_t>(
        std::count_if(ise.begin(), ise.end(), [](double v) { return !std::isfinite(v); }));
    std::tie(row.mise, row.std_error) = summarize(ise);
    row.censored_fraction = stable_mean(cens);
    row.mean_dim = summarize(dims).first;
    row.ise = std::move(ise);
    report.rows.push_back(std::move(row));
  }
  return report;
}

const FixedModelRow& OracleScan::best() const {
  const FixedModelRow* best = nullptr;
  for (const auto& r : rows) {
    if (!std::isfinite(r.mise)) continue;
    if (best == nullptr || r.mise < best->mise) best = &r;
  }
  if (best == nullptr) throw EstimationImpossible("oracle scan has no finite MISE");
  return *best;
}

OracleScan fixed_m_oracle_scan(const ScenarioSpec& spec, std::size_t n, std::size_t replications,
                               int grid_cap, std::uint64_t seed, unsigned jobs) {
  if (replications < 2) throw DomainError("oracle scan needs at least 2 replications");
  const ModelGrid grid = ModelGrid::for_sample_size(n, grid_cap);
  const std::size_t models = grid.models.size();
  // ise[m_index][rep]
  std::vector<std::vector<double>> ise(models, std::vector<double>(replications, kNaN));

  parallel_for(replications, jobs, [&](std::size_t r) {
    Rng rng(seed, replication_stream(n, r));
    const CensoredSample sample = generate_sample(spec, n, rng);
    const auto records = fit_models(sample, grid);
    for (std::size_t i = 0; i < models; ++i) {
      if (!records[i].admissible) continue;
      const DensityEstimate est = truncate_estimate(*records[i].coeffs, n);
      ise[i][r] = integrated_squared_error(est, spec.target);
    }
  });

  OracleScan scan{spec.name, n, replications, {}};
  for (std::size_t i = 0; i < models; ++i) {
    FixedModelRow row{grid.models[i]};
    row.failures = static_cast<std::size_t>(
        std::count_if(ise[i].begin(), ise[i].end(), [](double v) { return !std::isfinite(v); }));
    std::tie(row.mise, row.std_error) = summarize(ise[i]);
    scan.rows.push_back(row);
  }
  return scan;
}

VonMisesFit fit_von_mises(const DensityEstimate& est) {
  if (est.truncated) {
    throw NoFitError("cannot fit a Von Mises law to a truncated (identically zero) estimate");
  }
  const auto f = [&](double x) { return evaluate_density(est, Angle{x}); };
  const double c = trapezoid([&](double x) { return std::cos(x) * f(x); });
  const double s = trapezoid([&](double x) { return std::sin(x) * f(x); });
  const double mass = trapezoid(f);

  VonMisesFit fit;
  fit.mean_resultant_length = std::min(1.0, std::hypot(c, s) / std::max(mass, 1e-9));
  if (fit.mean_resultant_length <= 1e-12) {
    fit.mean_resultant_length = 0.0;
    fit.flat = true;
    return fit;
  }
  fit.mu = Angle{std::atan2(s, c)};
  fit.kappa = inverse_bessel_ratio_a1(fit.mean_resultant_length);
  return fit;
}

}  // namespace circense
