#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

namespace vcoh {

// Uniform time grid t_n = t0 + n*dt, n = 0..n_steps. Times in fs.
struct TimeGrid {
  double t0 = 0.0;
  double dt = 1.0;
  std::size_t n_steps = 0;

  double time(std::size_t n) const { return t0 + static_cast<double>(n) * dt; }
  std::size_t size() const { return n_steps + 1; }
  double span() const { return static_cast<double>(n_steps) * dt; }
  double end() const { return time(n_steps); }

  // Grid covering [0, t_end] with the given step; t_end is rounded to a whole
  // number of steps.
  static TimeGrid covering(double t_end, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
      throw std::invalid_argument("time grid: dt must be positive and finite");
    }
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
      throw std::invalid_argument("time grid: t_end must be non-negative and finite");
    }
    return TimeGrid{0.0, dt, static_cast<std::size_t>(std::llround(t_end / dt))};
  }

  // Rebuilds a grid from explicit sample times, rejecting anything that is not
  // strictly increasing with uniform spacing.
  static TimeGrid from_times(std::span<const double> times) {
    if (times.size() < 2) {
      throw std::invalid_argument("time grid: need at least two samples");
    }
    const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
    if (!(dt > 0.0)) {
      throw std::invalid_argument("time grid: times must be strictly increasing");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
      const double step = times[i] - times[i - 1];
      if (!(step > 0.0) || std::abs(step - dt) > 1e-9 * dt) {
        throw std::invalid_argument("time grid: non-uniform spacing at sample " +
                                    std::to_string(i));
      }
    }
    return TimeGrid{times.front(), dt, times.size() - 1};
  }
};

}  // namespace vcoh
