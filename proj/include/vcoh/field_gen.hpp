#pragma once

// Stochastic collisionally broadened CW fields.
//
// Only the slow phase of the field is sampled: a realization stores the
// unit-modulus envelope e^{i phi(t)} in the frame of the field's own carrier.
// Amplitude (the Rabi frequency) and carrier offsets are applied when the
// Hamiltonian is built.

#include <complex>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "vcoh/time_grid.hpp"

namespace vcoh {

using cplx = std::complex<double>;

enum class NoiseModel {
  PhaseJump,       // Poisson collisions at rate 1/tau_d, phase redrawn uniformly
  PhaseDiffusion,  // Wiener phase, Var[phi(t+s) - phi(t)] = 2 s / tau_d
};

std::string_view to_string(NoiseModel model);
NoiseModel noise_model_from_string(std::string_view name);

struct FieldParams {
  double rabi_amplitude = 0.0;    // mu eps0 / hbar, rad/fs
  double carrier_detuning = 0.0;  // rad/fs, offset from the assigned carrier
  double coherence_time = 1.0;    // tau_d, fs
  NoiseModel model = NoiseModel::PhaseJump;
  std::uint64_t stream_id = 0;
  // Phase at t = 0. With random_initial_phase the phase is drawn uniformly
  // instead, which makes the field stationary from the first sample.
  double initial_phase = 0.0;
  bool random_initial_phase = false;

  void validate() const;
};

struct PhaseJumpEvent {
  double time;   // fs
  double phase;  // rad, phase held from this time on
};

struct FieldRealization {
  TimeGrid grid;
  std::vector<cplx> envelope;
  std::vector<PhaseJumpEvent> events;  // PhaseJump only
};

// Coarsest step accepted by sample_field, as a fraction of tau_d.
inline constexpr double kMaxStepPerCoherenceTime = 1.0 / 20.0;

// Deterministic in (params, master_seed, grid). Throws std::invalid_argument
// for dt > tau_d / 20 or invalid parameters.
FieldRealization sample_field(const FieldParams& params, std::uint64_t master_seed,
                              const TimeGrid& grid);

// Normalized two-time correlation with per-lag standard errors.
struct CorrelationSeries {
  std::vector<double> lags;
  std::vector<cplx> value;
  std::vector<double> stderr_re;
  std::vector<double> stderr_im;
  std::vector<double> stderr_abs;
  std::size_t n_realizations = 0;

  double magnitude(std::size_t i) const { return std::abs(value[i]); }
};

// Lags 0, dt, 2dt, ... up to max_lag (inclusive, rounded down to the grid).
std::vector<double> lag_grid(const TimeGrid& grid, double max_lag);

// Streaming estimator of <a(t+tau) b*(t)> / <|b(t)|^2>. Each realization pair
// contributes its average over all t in the window with t + tau inside the
// window; standard errors come from the spread of these per-realization
// averages (delta method for the ratio). Time averaging exploits stationarity.
class CorrelationAccumulator {
 public:
  // window_begin/window_end restrict t to [begin, end] (fs); by default the
  // whole grid is used.
  CorrelationAccumulator(const TimeGrid& grid, std::span<const double> lags);
  CorrelationAccumulator(const TimeGrid& grid, std::span<const double> lags,
                         double window_begin, double window_end);

  void add(std::span<const cplx> a, std::span<const cplx> b);
  void add(const FieldRealization& a, const FieldRealization& b) {
    add(a.envelope, b.envelope);
  }

  CorrelationSeries result() const;
  std::size_t count() const { return count_; }

 private:
  TimeGrid grid_;
  std::vector<double> lags_;
  std::vector<std::size_t> lag_steps_;
  std::size_t first_ = 0;
  std::size_t last_ = 0;
  std::size_t count_ = 0;
  // Per realization and lag: numerator y and normalization n.
  std::vector<std::vector<cplx>> numer_;
  std::vector<std::vector<double>> norm_;
};

CorrelationSeries estimate_g1(std::span<const FieldRealization> realizations,
                              std::span<const double> lags);

CorrelationSeries estimate_cross_correlation(std::span<const FieldRealization> fields_a,
                                             std::span<const FieldRealization> fields_b,
                                             std::span<const double> lags);

}  // namespace vcoh
