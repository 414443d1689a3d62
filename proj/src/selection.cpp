#include "circense/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace circense {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<const ModelRecord*> admissible_sorted(std::span<const ModelRecord> records) {
  std::vector<const ModelRecord*> out;
  for (const auto& r : records) {
    if (r.admissible) out.push_back(&r);
  }
  std::sort(out.begin(), out.end(),
            [](const ModelRecord* a, const ModelRecord* b) { return a->m.m() < b->m.m(); });
  return out;
}

double regression_slope(std::span<const ModelRecord* const> models) {
  double mx = 0.0;
  double my = 0.0;
  for (const auto* r : models) {
    mx += r->penalty_shape;
    my += -r->contrast;
  }
  const double k = static_cast<double>(models.size());
  mx /= k;
  my /= k;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto* r : models) {
    const double dx = r->penalty_shape - mx;
    sxx += dx * dx;
    sxy += dx * (-r->contrast - my);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

// Walks the piecewise-constant map κ ↦ argmin(ζ + κ·shape) from κ = ∞ down
// to 0 and returns the breakpoint where the selected dimension jumps most.
std::optional<double> largest_jump_kappa(std::span<const ModelRecord* const> models) {
  const auto better_at_infinity = [](const ModelRecord* a, const ModelRecord* b) {
    if (a->penalty_shape != b->penalty_shape) return a->penalty_shape < b->penalty_shape;
    if (a->contrast != b->contrast) return a->contrast < b->contrast;
    return a->m.m() < b->m.m();
  };
  const ModelRecord* current = *std::min_element(models.begin(), models.end(), better_at_infinity);

  int best_jump = 0;
  std::optional<double> best_kappa;
  for (;;) {
    const ModelRecord* next = nullptr;
    double breakpoint = -1.0;
    for (const auto* r : models) {
      if (!(r->contrast < current->contrast && r->penalty_shape > current->penalty_shape)) continue;
      const double k = (current->contrast - r->contrast) / (r->penalty_shape - current->penalty_shape);
      // At a shared breakpoint the model with the larger shape wins just below it.
      if (k > breakpoint ||
          (k == breakpoint && (r->penalty_shape > next->penalty_shape ||
                               (r->penalty_shape == next->penalty_shape && r->m.m() < next->m.m())))) {
        breakpoint = k;
        next = r;
      }
    }
    if (next == nullptr) break;
    const int jump = next->m.dim() - current->m.dim();
    if (jump > best_jump) {
      best_jump = jump;
      best_kappa = breakpoint;
    }
    current = next;
  }
  return best_kappa;
}

}  // namespace

ModelGrid ModelGrid::for_sample_size(std::size_t n, int cap) {
  if (n < 4) {
    throw DomainError("model selection needs n >= 4, got n = " + std::to_string(n));
  }
  if (cap < 1) {
    throw DomainError("grid cap must be at least 1");
  }
  const int upper = std::min({static_cast<int>(n / 2) - 1, cap, kMaxModel});
  ModelGrid grid;
  grid.n = n;
  for (int m = 1; m <= upper; ++m) grid.models.emplace_back(m);
  return grid;
}

double CalibrationOptions::lower_clamp() const {
  if (min_kappa) return *min_kappa;
  return strategy == KappaStrategy::dimension_jump ? 0.05 : 1.0;
}

const ModelRecord& SelectionTrace::chosen_record() const {
  for (const auto& r : records) {
    if (r.m == chosen) return r;
  }
  throw std::logic_error("selection trace has no record for the chosen model");
}

double inverse_op_norm(const GramMatrix& gram) {
  const Spectrum s = spectrum(gram);
  if (!s.admissible()) {
    throw IllConditionedModel("inverse operator norm requested for an ill-conditioned Gram matrix");
  }
  return 1.0 / s.min;
}

double penalty_shape(ModelDim m, std::size_t n, double op_norm_inv) {
  return op_norm_inv * static_cast<double>(m.dim()) / (kTwoPi * static_cast<double>(n));
}

double penalty(ModelDim m, std::size_t n, double op_norm_inv, double kappa) {
  if (!(kappa > 0.0)) throw DomainError("kappa must be positive");
  if (n == 0) throw DomainError("sample size must be positive");
  return kappa * penalty_shape(m, n, op_norm_inv);
}

std::vector<ModelRecord> fit_models(const CensoredSample& sample, const ModelGrid& grid) {
  if (grid.models.empty()) {
    throw DomainError("empty model grid");
  }
  const ModelDim top = grid.largest();
  const GramMatrix gram = build_gram(sample, top);
  const MomentVector moments = build_moments(sample, top);

  std::vector<ModelRecord> records;
  records.reserve(grid.models.size());
  for (const ModelDim m : grid.models) {
    ModelRecord rec{m, false, kNaN, kNaN, kNaN, kNaN, std::nullopt};
    const GramMatrix g = gram.leading(m);
    const MomentVector u = moments.leading(m);
    try {
      auto coeffs = solve_coefficients(g, u);
      rec.op_norm_inv = inverse_op_norm(g);
      rec.contrast = contrast_value(coeffs, u);
      rec.penalty_shape = penalty_shape(m, sample.size(), rec.op_norm_inv);
      rec.penalty = 0.0;
      rec.admissible = true;
      rec.coeffs = std::move(coeffs);
    } catch (const IllConditionedModel&) {
      rec.admissible = false;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

SelectionTrace select_from_records(std::vector<ModelRecord> records, std::size_t n, double kappa,
                                   KappaSource source) {
  if (!(kappa > 0.0)) throw DomainError("kappa must be positive");
  SelectionTrace trace;
  trace.n = n;
  trace.kappa = kappa;
  trace.kappa_source = source;

  std::sort(records.begin(), records.end(),
            [](const ModelRecord& a, const ModelRecord& b) { return a.m.m() < b.m.m(); });
  const ModelRecord* best = nullptr;
  double best_value = std::numeric_limits<double>::infinity();
  for (auto& r : records) {
    if (!r.admissible) {
      r.penalty = kNaN;
      continue;
    }
    r.penalty = kappa * r.penalty_shape;
    const double value = SelectionTrace::criterion(r);
    if (best == nullptr || value < best_value) {
      best = &r;
      best_value = value;
    }
  }
  if (best == nullptr) {
    throw EstimationImpossible(
        "no admissible model: the observation windows are too sparse to estimate the density");
  }
  trace.chosen = best->m;
  trace.records = std::move(records);
  return trace;
}

SelectionTrace select_model(const CensoredSample& sample, const ModelGrid& grid, double kappa) {
  return select_from_records(fit_models(sample, grid), sample.size(), kappa);
}

KappaCalibration calibrate_kappa(std::span<const ModelRecord> records,
                                 const CalibrationOptions& options) {
  const auto models = admissible_sorted(records);
  if (models.size() < kMinCalibrationModels) {
    return KappaCalibration{kFallbackKappa, KappaSource::fallback};
  }

  double raw = 0.0;
  switch (options.strategy) {
    case KappaStrategy::slope_regression: {
      const auto count = static_cast<std::size_t>(
          std::ceil(options.regression_fraction * static_cast<double>(models.size())));
      const std::size_t k = std::clamp<std::size_t>(count, 2, models.size());
      raw = 2.0 * regression_slope(std::span(models).last(k));
      break;
    }
    case KappaStrategy::dimension_jump: {
      const auto jump = largest_jump_kappa(models);
      if (!jump) {
        // The same model wins for every κ: nothing to calibrate.
        return KappaCalibration{kFallbackKappa, KappaSource::fallback};
      }
      raw = 2.0 * *jump;
      break;
    }
  }
  return KappaCalibration{std::clamp(raw, options.lower_clamp(), options.max_kappa),
                          KappaSource::calibrated};
}

AdaptiveFit estimate_adaptive(const CensoredSample& sample, const AdaptiveOptions& options) {
  const ModelGrid grid = ModelGrid::for_sample_size(sample.size(), options.grid_cap);
  auto records = fit_models(sample, grid);
  KappaCalibration cal;
  if (options.kappa) {
    cal = KappaCalibration{*options.kappa, KappaSource::user};
  } else {
    cal = calibrate_kappa(records, options.calibration);
  }
  SelectionTrace trace = select_from_records(std::move(records), sample.size(), cal.kappa, cal.source);
  DensityEstimate est = truncate_estimate(*trace.chosen_record().coeffs, sample.size());
  return AdaptiveFit{std::move(trace), std::move(est)};
}

std::string to_string(KappaStrategy s) {
  switch (s) {
    case KappaStrategy::dimension_jump: return "jump";
    case KappaStrategy::slope_regression: return "slope";
  }
  return "unknown";
}

std::string to_string(KappaSource s) {
  switch (s) {
    case KappaSource::user: return "user";
    case KappaSource::calibrated: return "calibrated";
    case KappaSource::fallback: return "fallback";
  }
  return "unknown";
}

KappaStrategy parse_kappa_strategy(const std::string& text) {
  if (text == "jump") return KappaStrategy::dimension_jump;
  if (text == "slope") return KappaStrategy::slope_regression;
  throw DomainError("unknown kappa strategy '" + text + "' (expected 'jump' or 'slope')");
}

}  // namespace circense
