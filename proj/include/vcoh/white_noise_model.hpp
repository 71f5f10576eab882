#pragma once

// Ensemble-averaged dynamics of the V system pumped by two uncorrelated white
// noise fields. Populations obey linear rate equations; the excited-state
// coherence obeys a homogeneous equation and therefore stays zero when it
// starts at zero.

#include <complex>

#include "vcoh/observables.hpp"
#include "vcoh/time_grid.hpp"

namespace vcoh {

struct PumpRates {
  double gamma_1 = 0.0;   // 2 mu_1^2 R_1 / hbar^2, 1/fs
  double gamma_2 = 0.0;   // 2 mu_2^2 R_2 / hbar^2, 1/fs
  double omega_12 = 0.0;  // excited-state splitting, rad/fs

  void validate() const;
};

struct WhiteNoiseState {
  double rho_gg = 1.0;
  double rho_11 = 0.0;
  double rho_22 = 0.0;
  std::complex<double> rho_12 = 0.0;

  double trace() const { return rho_gg + rho_11 + rho_22; }
  // Ground-excited coherences are not generated by the rate model and are zero.
  DensityMatrix to_density_matrix() const;
};

// Time derivative of every tracked element.
WhiteNoiseState rate_rhs(const WhiteNoiseState& state, const PumpRates& rates);

enum class WhiteNoiseSolver {
  ClosedForm,  // eigen-decomposition of the symmetric population generator
  Adaptive,    // Dormand-Prince with tight tolerances
};

ObservableSeries solve_white_noise(const PumpRates& rates, const WhiteNoiseState& initial,
                                   const TimeGrid& grid,
                                   WhiteNoiseSolver solver = WhiteNoiseSolver::ClosedForm);

// Raw state trajectory, same solvers.
std::vector<WhiteNoiseState> white_noise_trajectory(const PumpRates& rates,
                                                    const WhiteNoiseState& initial,
                                                    const TimeGrid& grid,
                                                    WhiteNoiseSolver solver);

// (1/3, 1/3, 1/3, 0). Throws std::domain_error if either rate is zero: the
// stationary state is then not unique.
WhiteNoiseState steady_state(const PumpRates& rates);

}  // namespace vcoh
