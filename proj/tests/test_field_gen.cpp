#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "vcoh/field_gen.hpp"
#include "vcoh/rng.hpp"

using namespace vcoh;

namespace {

FieldParams phase_jump(double tau_d, std::uint64_t stream) {
  FieldParams p;
  p.coherence_time = tau_d;
  p.stream_id = stream;
  p.rabi_amplitude = 0.01;
  return p;
}

std::vector<FieldRealization> ensemble(FieldParams p, std::size_t n, const TimeGrid& grid,
                                       std::uint64_t first_stream, std::uint64_t seed = 1) {
  std::vector<FieldRealization> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    p.stream_id = first_stream + 2 * k;
    out.push_back(sample_field(p, seed, grid));
  }
  return out;
}

TimeGrid stats_grid(double tau_d) { return TimeGrid{0.0, tau_d / 20.0, 800}; }

}  // namespace

TEST_CASE("field parameters are validated") {
  const TimeGrid grid{0.0, 1.0, 10};
  FieldParams p = phase_jump(60.0, 0);
  CHECK_NOTHROW(sample_field(p, 1, grid));
  p.coherence_time = 0.0;
  CHECK_THROWS_AS(sample_field(p, 1, grid), std::invalid_argument);
  p.coherence_time = 60.0;
  p.rabi_amplitude = -1.0;
  CHECK_THROWS_AS(sample_field(p, 1, grid), std::invalid_argument);
  CHECK(noise_model_from_string(to_string(NoiseModel::PhaseDiffusion)) ==
        NoiseModel::PhaseDiffusion);
  CHECK_THROWS(noise_model_from_string("telegraph"));
}

TEST_CASE("coarse grids are rejected") {
  FieldParams p = phase_jump(60.0, 0);
  CHECK_NOTHROW(sample_field(p, 1, TimeGrid{0.0, 3.0, 10}));
  CHECK_THROWS_AS(sample_field(p, 1, TimeGrid{0.0, 3.01, 10}), std::invalid_argument);
  p.model = NoiseModel::PhaseDiffusion;
  CHECK_THROWS_AS(sample_field(p, 1, TimeGrid{0.0, 3.01, 10}), std::invalid_argument);
}

TEST_CASE("non-uniform sample times cannot form a grid") {
  const std::vector<double> t = {0.0, 1.0, 2.0, 3.5};
  CHECK_THROWS_AS(TimeGrid::from_times(t), std::invalid_argument);
  const std::vector<double> u = {0.0, 0.5, 1.0, 1.5};
  CHECK(TimeGrid::from_times(u).n_steps == 3);
}

TEST_CASE("envelopes have unit modulus") {
  const TimeGrid grid{0.0, 1.0, 5000};
  for (auto model : {NoiseModel::PhaseJump, NoiseModel::PhaseDiffusion}) {
    FieldParams p = phase_jump(20.0, 3);
    p.model = model;
    const auto f = sample_field(p, 9, grid);
    REQUIRE(f.envelope.size() == grid.size());
    for (const cplx& e : f.envelope) CHECK(std::abs(std::abs(e) - 1.0) < 1e-15);
  }
}

TEST_CASE("infinite coherence time gives a constant envelope") {
  const TimeGrid grid{0.0, 1.0, 1000};
  for (auto model : {NoiseModel::PhaseJump, NoiseModel::PhaseDiffusion}) {
    FieldParams p = phase_jump(std::numeric_limits<double>::infinity(), 0);
    p.model = model;
    p.initial_phase = 0.7;
    const auto f = sample_field(p, 1, grid);
    CHECK(f.events.empty());
    for (const cplx& e : f.envelope) CHECK(e == std::polar(1.0, 0.7));
  }
}

TEST_CASE("sampling is deterministic and streams differ") {
  const TimeGrid grid{0.0, 1.0, 2000};
  for (auto model : {NoiseModel::PhaseJump, NoiseModel::PhaseDiffusion}) {
    FieldParams p = phase_jump(30.0, 4);
    p.model = model;
    p.random_initial_phase = true;
    const auto a = sample_field(p, 77, grid);
    const auto b = sample_field(p, 77, grid);
    CHECK(a.envelope == b.envelope);
    p.stream_id = 5;
    CHECK(sample_field(p, 77, grid).envelope != a.envelope);
    p.stream_id = 4;
    CHECK(sample_field(p, 78, grid).envelope != a.envelope);
  }
}

TEST_CASE("phase-jump event log drives the envelope") {
  const TimeGrid grid{0.0, 0.5, 4000};
  const auto f = sample_field(phase_jump(25.0, 6), 3, grid);
  REQUIRE(!f.events.empty());
  double prev = 0.0;
  for (const auto& e : f.events) {
    CHECK(e.time > prev);
    CHECK(e.time <= grid.end());
    CHECK(e.phase >= 0.0);
    CHECK(e.phase < 2.0 * std::numbers::pi);
    prev = e.time;
  }
  std::size_t next = 0;
  double phase = 0.0;
  for (std::size_t n = 0; n < grid.size(); ++n) {
    while (next < f.events.size() && f.events[next].time <= grid.time(n)) phase = f.events[next++].phase;
    CHECK(std::abs(f.envelope[n] - std::polar(1.0, phase)) < 1e-15);
  }
}

TEST_CASE("jump count follows the Poisson rate") {
  const double tau_d = 40.0;
  const TimeGrid grid{0.0, 1.0, 4000};
  const std::size_t n = 500;
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    total += static_cast<double>(sample_field(phase_jump(tau_d, k), 2, grid).events.size());
  }
  const double expected = grid.span() / tau_d;  // per realization
  const double sigma = std::sqrt(expected / n);
  CHECK(std::abs(total / n - expected) < 4.0 * sigma);
}

TEST_CASE("phase diffusion increments have variance 2 dt / tau_d") {
  FieldParams p = phase_jump(50.0, 1);
  p.model = NoiseModel::PhaseDiffusion;
  const TimeGrid grid{0.0, 0.5, 20000};
  const auto f = sample_field(p, 4, grid);
  double sum2 = 0.0;
  for (std::size_t n = 1; n < grid.size(); ++n) {
    const double d = std::arg(f.envelope[n] * std::conj(f.envelope[n - 1]));
    sum2 += d * d;
  }
  const double var = sum2 / static_cast<double>(grid.n_steps);
  CHECK(var == doctest::Approx(2.0 * grid.dt / p.coherence_time).epsilon(0.05));
}

TEST_CASE("lag grid and accumulator arguments") {
  const TimeGrid grid{0.0, 2.0, 100};
  const auto lags = lag_grid(grid, 11.0);
  REQUIRE(lags.size() == 6);
  CHECK(lags.back() == 10.0);

  const std::vector<double> too_long = {0.0, 202.0};
  CHECK_THROWS_AS(CorrelationAccumulator(grid, too_long), std::invalid_argument);
  const std::vector<double> negative = {-2.0};
  CHECK_THROWS_AS(CorrelationAccumulator(grid, negative), std::invalid_argument);
  const std::vector<double> off_grid = {3.0};
  CHECK_THROWS_AS(CorrelationAccumulator(grid, off_grid), std::invalid_argument);

  CorrelationAccumulator acc(grid, lags);
  const auto f = sample_field(phase_jump(60.0, 0), 1, grid);
  acc.add(f, f);
  CHECK_THROWS(acc.result());  // needs two realizations

  const auto one = ensemble(phase_jump(60.0, 0), 1, grid, 0);
  CHECK_THROWS(estimate_g1(one, lags));
  const auto two = ensemble(phase_jump(60.0, 0), 2, grid, 0);
  const auto three = ensemble(phase_jump(60.0, 0), 3, grid, 1);
  CHECK_THROWS(estimate_cross_correlation(two, three, lags));
}

TEST_CASE("g1 is exactly one at zero lag") {
  const TimeGrid grid = stats_grid(60.0);
  const auto fields = ensemble(phase_jump(60.0, 0), 50, grid, 0);
  const auto g = estimate_g1(fields, lag_grid(grid, 60.0));
  CHECK(std::abs(g.value[0] - 1.0) < 1e-12);
  CHECK(g.stderr_abs[0] < 1e-12);
}

TEST_CASE("constant-phase ensemble is fully coherent") {
  const TimeGrid grid{0.0, 1.0, 300};
  std::vector<FieldRealization> fields;
  for (int k = 0; k < 5; ++k) {
    FieldRealization f{grid, std::vector<cplx>(grid.size(), std::polar(1.0, 0.3 * k)), {}};
    fields.push_back(f);
  }
  const auto g = estimate_g1(fields, lag_grid(grid, 200.0));
  for (std::size_t i = 0; i < g.lags.size(); ++i) CHECK(std::abs(g.magnitude(i) - 1.0) < 1e-12);
}

TEST_CASE("g1 decays as exp(-tau/tau_d) for both noise models") {
  for (double tau_d : {60.0, 120.0}) {
    const TimeGrid grid = stats_grid(tau_d);
    const auto lags = lag_grid(grid, 3.0 * tau_d);
    std::vector<CorrelationSeries> curves;
    for (auto model : {NoiseModel::PhaseJump, NoiseModel::PhaseDiffusion}) {
      FieldParams p = phase_jump(tau_d, 0);
      p.model = model;
      p.random_initial_phase = true;
      CorrelationAccumulator acc(grid, lags);
      for (std::size_t k = 0; k < 3000; ++k) {
        p.stream_id = 2 * k;
        const auto f = sample_field(p, 5, grid);
        acc.add(f, f);
      }
      curves.push_back(acc.result());
      const auto& g = curves.back();
      for (std::size_t i = 0; i < lags.size(); ++i) {
        const double model_value = std::exp(-lags[i] / tau_d);
        CHECK(std::abs(g.magnitude(i) - model_value) <= 3.0 * g.stderr_abs[i] + 1e-12);
      }
    }
    for (std::size_t i = 0; i < lags.size(); ++i) {
      const double se = std::hypot(curves[0].stderr_abs[i], curves[1].stderr_abs[i]);
      CHECK(std::abs(curves[0].magnitude(i) - curves[1].magnitude(i)) <= 3.0 * se + 1e-12);
    }
  }
}

TEST_CASE("g1 is stationary across half windows") {
  const double tau_d = 60.0;
  const TimeGrid grid = stats_grid(tau_d);
  const auto lags = lag_grid(grid, 2.0 * tau_d);
  const double half = grid.end() / 2.0;
  CorrelationAccumulator first(grid, lags, 0.0, half), second(grid, lags, half, grid.end());
  FieldParams p = phase_jump(tau_d, 0);
  p.random_initial_phase = true;
  for (std::size_t k = 0; k < 2000; ++k) {
    p.stream_id = 2 * k;
    const auto f = sample_field(p, 8, grid);
    first.add(f, f);
    second.add(f, f);
  }
  const auto a = first.result(), b = second.result();
  for (std::size_t i = 0; i < lags.size(); ++i) {
    const double se = std::hypot(a.stderr_abs[i], b.stderr_abs[i]);
    CHECK(std::abs(a.magnitude(i) - b.magnitude(i)) <= 3.0 * se + 1e-12);
  }
}

TEST_CASE("cross-correlation of a field with itself is its g1") {
  const TimeGrid grid = stats_grid(60.0);
  const auto fields = ensemble(phase_jump(60.0, 0), 40, grid, 0);
  const auto lags = lag_grid(grid, 120.0);
  const auto g = estimate_g1(fields, lags);
  const auto c = estimate_cross_correlation(fields, fields, lags);
  for (std::size_t i = 0; i < lags.size(); ++i) CHECK(std::abs(g.value[i] - c.value[i]) < 1e-15);
}

TEST_CASE("independent streams are uncorrelated and residuals shrink with N") {
  const double tau_d = 60.0;
  const TimeGrid grid = stats_grid(tau_d);
  const auto lags = lag_grid(grid, 3.0 * tau_d);
  FieldParams p = phase_jump(tau_d, 0);
  p.random_initial_phase = true;

  auto mean_abs_cross = [&](std::size_t n, double* worst_ratio) {
    CorrelationAccumulator acc(grid, lags);
    FieldParams q = p;
    for (std::size_t k = 0; k < n; ++k) {
      p.stream_id = 2 * k;
      q.stream_id = 2 * k + 1;
      acc.add(sample_field(p, 12, grid), sample_field(q, 12, grid));
    }
    const auto c = acc.result();
    double mean = 0.0, worst = 0.0;
    for (std::size_t i = 0; i < lags.size(); ++i) {
      mean += c.magnitude(i);
      worst = std::max(worst, c.magnitude(i) * std::sqrt(static_cast<double>(n)));
    }
    if (worst_ratio) *worst_ratio = worst;
    return mean / static_cast<double>(lags.size());
  };

  double worst = 0.0;
  const double small = mean_abs_cross(10, nullptr);
  const double large = mean_abs_cross(4000, &worst);
  CHECK(small > 0.0);
  CHECK(large < small);
  CHECK(worst < 3.0);
}

TEST_CASE("stream generator basics") {
  StreamRng a(1, 0), b(1, 0), c(1, 1);
  for (int i = 0; i < 100; ++i) {
    const auto x = a(), y = b(), z = c();
    CHECK(x == y);
    CHECK(x != z);
  }
  StreamRng u(5, 9);
  double mean = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double v = u.uniform();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
    mean += v;
  }
  CHECK(mean / n == doctest::Approx(0.5).epsilon(0.01));

  // neighbouring streams are not linearly related
  StreamRng s0(3, 10), s1(3, 11);
  double sxy = 0.0;
  for (int i = 0; i < n; ++i) sxy += (s0.uniform() - 0.5) * (s1.uniform() - 0.5);
  CHECK(std::abs(sxy / n) < 4.0 * (1.0 / 12.0) / std::sqrt(static_cast<double>(n)));
}
