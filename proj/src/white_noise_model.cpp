#include "vcoh/white_noise_model.hpp"

#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <stdexcept>
#include <string>

namespace vcoh {

namespace {

void check_state(const WhiteNoiseState& s) {
  constexpr double tol = 1e-9;
  if (s.rho_gg < -tol || s.rho_11 < -tol || s.rho_22 < -tol ||
      std::abs(s.trace() - 1.0) > tol) {
    throw std::invalid_argument("white noise: populations must be non-negative and sum to 1");
  }
  if (std::norm(s.rho_12) > s.rho_11 * s.rho_22 + tol) {
    throw std::invalid_argument("white noise: |rho_12|^2 exceeds rho_11 rho_22");
  }
}

Eigen::Matrix3d population_generator(const PumpRates& r) {
  Eigen::Matrix3d a;
  // clang-format off
  a << -(r.gamma_1 + r.gamma_2), r.gamma_1, r.gamma_2,
        r.gamma_1,              -r.gamma_1, 0.0,
        r.gamma_2,               0.0,       -r.gamma_2;
  // clang-format on
  return a;
}

std::complex<double> coherence_rate(const PumpRates& r) {
  return {-0.5 * (r.gamma_1 + r.gamma_2), -r.omega_12};
}

std::vector<WhiteNoiseState> closed_form(const PumpRates& rates, const WhiteNoiseState& init,
                                         const TimeGrid& grid) {
  // The population generator is symmetric, so p(t) = V exp(L t) V^T p(0).
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(population_generator(rates));
  const Eigen::Matrix3d& v = es.eigenvectors();
  const Eigen::Vector3d& lambda = es.eigenvalues();
  const Eigen::Vector3d p0(init.rho_gg, init.rho_11, init.rho_22);
  const Eigen::Vector3d modes = v.transpose() * p0;
  const std::complex<double> k = coherence_rate(rates);

  std::vector<WhiteNoiseState> out;
  out.reserve(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const double t = grid.time(n) - grid.t0;
    const Eigen::Vector3d p = v * (lambda.array() * t).exp().matrix().cwiseProduct(modes);
    WhiteNoiseState s;
    s.rho_gg = p(0);
    s.rho_11 = p(1);
    s.rho_22 = p(2);
    s.rho_12 = init.rho_12 == 0.0 ? std::complex<double>(0.0) : init.rho_12 * std::exp(k * t);
    out.push_back(s);
  }
  return out;
}

std::vector<WhiteNoiseState> adaptive(const PumpRates& rates, const WhiteNoiseState& init,
                                      const TimeGrid& grid) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 5>;
  auto rhs = [&rates](const State& x, State& dxdt, double /*t*/) {
    const WhiteNoiseState s{x[0], x[1], x[2], {x[3], x[4]}};
    const WhiteNoiseState d = rate_rhs(s, rates);
    dxdt = {d.rho_gg, d.rho_11, d.rho_22, d.rho_12.real(), d.rho_12.imag()};
  };
  State x = {init.rho_gg, init.rho_11, init.rho_22, init.rho_12.real(), init.rho_12.imag()};
  std::vector<double> times(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) times[n] = grid.time(n);

  std::vector<WhiteNoiseState> out;
  out.reserve(grid.size());
  auto observer = [&out](const State& s, double /*t*/) {
    out.push_back({s[0], s[1], s[2], {s[3], s[4]}});
  };
  auto stepper = odeint::make_dense_output(1e-13, 1e-13, odeint::runge_kutta_dopri5<State>());
  if (grid.n_steps == 0) {
    observer(x, grid.t0);
    return out;
  }
  odeint::integrate_times(stepper, rhs, x, times.begin(), times.end(), grid.dt, observer);
  return out;
}

}  // namespace

void PumpRates::validate() const {
  if (!(gamma_1 >= 0.0) || !(gamma_2 >= 0.0) || !std::isfinite(gamma_1) ||
      !std::isfinite(gamma_2)) {
    throw std::invalid_argument("pump rates: gamma_1 and gamma_2 must be non-negative");
  }
  if (!std::isfinite(omega_12)) {
    throw std::invalid_argument("pump rates: omega_12 must be finite");
  }
}

DensityMatrix WhiteNoiseState::to_density_matrix() const {
  Matrix3c m = Matrix3c::Zero();
  m(kGround, kGround) = rho_gg;
  m(kExcited1, kExcited1) = rho_11;
  m(kExcited2, kExcited2) = rho_22;
  m(kExcited1, kExcited2) = rho_12;
  m(kExcited2, kExcited1) = std::conj(rho_12);
  return DensityMatrix::unchecked(m);
}

WhiteNoiseState rate_rhs(const WhiteNoiseState& s, const PumpRates& r) {
  WhiteNoiseState d;
  d.rho_gg = r.gamma_1 * s.rho_11 + r.gamma_2 * s.rho_22 - (r.gamma_1 + r.gamma_2) * s.rho_gg;
  d.rho_11 = r.gamma_1 * (s.rho_gg - s.rho_11);
  d.rho_22 = r.gamma_2 * (s.rho_gg - s.rho_22);
  d.rho_12 = coherence_rate(r) * s.rho_12;
  return d;
}

std::vector<WhiteNoiseState> white_noise_trajectory(const PumpRates& rates,
                                                    const WhiteNoiseState& initial,
                                                    const TimeGrid& grid,
                                                    WhiteNoiseSolver solver) {
  rates.validate();
  check_state(initial);
  return solver == WhiteNoiseSolver::ClosedForm ? closed_form(rates, initial, grid)
                                                : adaptive(rates, initial, grid);
}

ObservableSeries solve_white_noise(const PumpRates& rates, const WhiteNoiseState& initial,
                                   const TimeGrid& grid, WhiteNoiseSolver solver) {
  const auto states = white_noise_trajectory(rates, initial, grid, solver);
  ObservableSeries out;
  out.reserve(states.size());
  for (std::size_t n = 0; n < states.size(); ++n) {
    out.append(grid.time(n), states[n].to_density_matrix());
  }
  return out;
}

WhiteNoiseState steady_state(const PumpRates& rates) {
  rates.validate();
  if (rates.gamma_1 == 0.0 || rates.gamma_2 == 0.0) {
    throw std::domain_error(
        "white noise steady state: a zero pump rate decouples its excited level, so the "
        "stationary state is not unique (gamma_1 = " + std::to_string(rates.gamma_1) +
        ", gamma_2 = " + std::to_string(rates.gamma_2) + ")");
  }
  return {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0};
}

}  // namespace vcoh
