#include "vcoh/field_gen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "vcoh/rng.hpp"

namespace vcoh {

std::string_view to_string(NoiseModel model) {
  switch (model) {
    case NoiseModel::PhaseJump:
      return "phase_jump";
    case NoiseModel::PhaseDiffusion:
      return "phase_diffusion";
  }
  return "unknown";
}

NoiseModel noise_model_from_string(std::string_view name) {
  if (name == "phase_jump") return NoiseModel::PhaseJump;
  if (name == "phase_diffusion") return NoiseModel::PhaseDiffusion;
  throw std::invalid_argument("unknown noise model '" + std::string(name) +
                              "' (expected phase_jump or phase_diffusion)");
}

void FieldParams::validate() const {
  if (!(coherence_time > 0.0)) {
    throw std::invalid_argument("field: coherence time must be positive");
  }
  if (!(rabi_amplitude >= 0.0) || !std::isfinite(rabi_amplitude)) {
    throw std::invalid_argument("field: rabi amplitude must be non-negative and finite");
  }
  if (!std::isfinite(carrier_detuning) || !std::isfinite(initial_phase)) {
    throw std::invalid_argument("field: carrier detuning and initial phase must be finite");
  }
}

FieldRealization sample_field(const FieldParams& params, std::uint64_t master_seed,
                              const TimeGrid& grid) {
  params.validate();
  if (!(grid.dt > 0.0)) {
    throw std::invalid_argument("field: grid spacing must be positive");
  }
  if (grid.dt > params.coherence_time * kMaxStepPerCoherenceTime * (1.0 + 1e-12)) {
    throw std::invalid_argument("field: dt = " + std::to_string(grid.dt) +
                                " fs exceeds tau_d/20 = " +
                                std::to_string(params.coherence_time / 20.0) + " fs");
  }

  StreamRng rng(master_seed, params.stream_id);
  FieldRealization out;
  out.grid = grid;
  out.envelope.resize(grid.size());

  double phase = params.random_initial_phase ? rng.uniform_phase() : params.initial_phase;

  switch (params.model) {
    case NoiseModel::PhaseJump: {
      const double tau = params.coherence_time;
      double next_jump = grid.t0 + rng.exponential(tau);
      for (std::size_t n = 0; n < grid.size(); ++n) {
        const double t = grid.time(n);
        while (next_jump <= t) {
          phase = rng.uniform_phase();
          out.events.push_back({next_jump, phase});
          next_jump += rng.exponential(tau);
        }
        out.envelope[n] = std::polar(1.0, phase);
      }
      break;
    }
    case NoiseModel::PhaseDiffusion: {
      const double sigma = std::sqrt(2.0 * grid.dt / params.coherence_time);
      out.envelope[0] = std::polar(1.0, phase);
      for (std::size_t n = 1; n < grid.size(); ++n) {
        phase += sigma * rng.normal();
        out.envelope[n] = std::polar(1.0, phase);
      }
      break;
    }
  }
  return out;
}

std::vector<double> lag_grid(const TimeGrid& grid, double max_lag) {
  if (max_lag < 0.0 || max_lag > grid.span() * (1.0 + 1e-12)) {
    throw std::invalid_argument("lag grid: max lag outside the grid span");
  }
  const auto n = static_cast<std::size_t>(std::floor(max_lag / grid.dt + 1e-9));
  std::vector<double> lags(n + 1);
  for (std::size_t i = 0; i <= n; ++i) lags[i] = static_cast<double>(i) * grid.dt;
  return lags;
}

CorrelationAccumulator::CorrelationAccumulator(const TimeGrid& grid,
                                               std::span<const double> lags)
    : CorrelationAccumulator(grid, lags, grid.t0, grid.end()) {}

CorrelationAccumulator::CorrelationAccumulator(const TimeGrid& grid,
                                               std::span<const double> lags,
                                               double window_begin, double window_end)
    : grid_(grid), lags_(lags.begin(), lags.end()) {
  if (lags_.empty()) throw std::invalid_argument("correlation: no lags requested");
  const double b = std::max(window_begin, grid.t0);
  const double e = std::min(window_end, grid.end());
  if (!(e > b)) throw std::invalid_argument("correlation: empty time window");
  first_ = static_cast<std::size_t>(std::ceil((b - grid.t0) / grid.dt - 1e-9));
  last_ = static_cast<std::size_t>(std::floor((e - grid.t0) / grid.dt + 1e-9));
  const std::size_t span_steps = last_ - first_;
  for (double lag : lags_) {
    const double steps = lag / grid.dt;
    const auto k = static_cast<std::size_t>(std::llround(std::abs(steps)));
    if (lag < 0.0 || std::abs(steps - static_cast<double>(k)) > 1e-6) {
      throw std::invalid_argument("correlation: lag " + std::to_string(lag) +
                                  " fs is not a non-negative multiple of dt");
    }
    if (k > span_steps) {
      throw std::invalid_argument("correlation: lag " + std::to_string(lag) +
                                  " fs exceeds the grid span");
    }
    lag_steps_.push_back(k);
  }
  numer_.resize(lags_.size());
  norm_.resize(lags_.size());
}

void CorrelationAccumulator::add(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != grid_.size() || b.size() != grid_.size()) {
    throw std::invalid_argument("correlation: realization does not match the grid");
  }
  for (std::size_t l = 0; l < lag_steps_.size(); ++l) {
    const std::size_t k = lag_steps_[l];
    cplx sum = 0.0;
    double norm = 0.0;
    for (std::size_t t = first_; t + k <= last_; ++t) {
      const cplx x = a[t + k];
      const cplx y = b[t];
      sum += x * std::conj(y);
      const double nx = x.real() * x.real() + x.imag() * x.imag();
      const double ny = y.real() * y.real() + y.imag() * y.imag();
      norm += std::sqrt(nx * ny);
    }
    const double m = static_cast<double>(last_ - k - first_ + 1);
    numer_[l].push_back(sum / m);
    norm_[l].push_back(norm / m);
  }
  ++count_;
}

CorrelationSeries CorrelationAccumulator::result() const {
  if (count_ < 2) {
    throw std::invalid_argument("correlation: at least two realizations are required");
  }
  CorrelationSeries out;
  out.lags = lags_;
  out.n_realizations = count_;
  const double n = static_cast<double>(count_);
  for (std::size_t l = 0; l < lags_.size(); ++l) {
    cplx ysum = 0.0;
    double nsum = 0.0;
    for (std::size_t k = 0; k < count_; ++k) {
      ysum += numer_[l][k];
      nsum += norm_[l][k];
    }
    const double nbar = nsum / n;
    const cplx g = ysum / nsum;
    const double mag = std::abs(g);
    const cplx dir = mag > 0.0 ? g / mag : cplx(1.0, 0.0);
    double var_re = 0.0, var_im = 0.0, var_par = 0.0;
    for (std::size_t k = 0; k < count_; ++k) {
      const cplx z = numer_[l][k] - g * norm_[l][k];
      var_re += z.real() * z.real();
      var_im += z.imag() * z.imag();
      const double par = (std::conj(dir) * z).real();
      var_par += par * par;
    }
    const double scale = 1.0 / (nbar * std::sqrt(n * (n - 1.0)));
    out.value.push_back(g);
    out.stderr_re.push_back(std::sqrt(var_re) * scale);
    out.stderr_im.push_back(std::sqrt(var_im) * scale);
    out.stderr_abs.push_back(mag > 0.0 ? std::sqrt(var_par) * scale
                                       : std::sqrt(0.5 * (var_re + var_im)) * scale);
  }
  return out;
}

namespace {

const TimeGrid& common_grid(std::span<const FieldRealization> fields) {
  if (fields.size() < 2) {
    throw std::invalid_argument("correlation: at least two realizations are required");
  }
  const TimeGrid& grid = fields.front().grid;
  for (const auto& f : fields) {
    if (f.grid.size() != grid.size() || f.grid.dt != grid.dt || f.grid.t0 != grid.t0) {
      throw std::invalid_argument("correlation: realizations do not share a grid");
    }
  }
  return grid;
}

}  // namespace

CorrelationSeries estimate_g1(std::span<const FieldRealization> realizations,
                              std::span<const double> lags) {
  CorrelationAccumulator acc(common_grid(realizations), lags);
  for (const auto& r : realizations) acc.add(r, r);
  return acc.result();
}

CorrelationSeries estimate_cross_correlation(std::span<const FieldRealization> fields_a,
                                             std::span<const FieldRealization> fields_b,
                                             std::span<const double> lags) {
  if (fields_a.size() != fields_b.size()) {
    throw std::invalid_argument("cross-correlation: collections differ in size (" +
                                std::to_string(fields_a.size()) + " vs " +
                                std::to_string(fields_b.size()) + ")");
  }
  const TimeGrid& grid = common_grid(fields_a);
  common_grid(fields_b);
  if (fields_b.front().grid.size() != grid.size() || fields_b.front().grid.dt != grid.dt) {
    throw std::invalid_argument("cross-correlation: collections do not share a grid");
  }
  CorrelationAccumulator acc(grid, lags);
  for (std::size_t k = 0; k < fields_a.size(); ++k) acc.add(fields_a[k], fields_b[k]);
  return acc.result();
}

}  // namespace vcoh
