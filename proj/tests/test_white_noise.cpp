#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "vcoh/white_noise_model.hpp"

using namespace vcoh;

namespace {

double max_diff(const WhiteNoiseState& a, const WhiteNoiseState& b) {
  return std::max({std::abs(a.rho_gg - b.rho_gg), std::abs(a.rho_11 - b.rho_11),
                   std::abs(a.rho_22 - b.rho_22), std::abs(a.rho_12 - b.rho_12)});
}

}  // namespace

TEST_CASE("uniform state is a fixed point") {
  const PumpRates r{0.2, 0.35, 0.0};
  const auto d = rate_rhs({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0}, r);
  CHECK(std::abs(d.rho_gg) < 1e-16);
  CHECK(std::abs(d.rho_11) < 1e-16);
  CHECK(std::abs(d.rho_22) < 1e-16);
  CHECK(d.rho_12 == cplx(0.0, 0.0));
}

TEST_CASE("ground state derivatives") {
  const double g = 0.25;
  const auto d = rate_rhs(WhiteNoiseState{}, {g, g, 0.1});
  CHECK(d.rho_11 == g);
  CHECK(d.rho_22 == g);
  CHECK(d.rho_gg == -2.0 * g);
  CHECK(d.rho_12 == cplx(0.0, 0.0));
}

TEST_CASE("right-hand side matches an independent transcription") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double a = u(gen), b = u(gen), c = u(gen), s = a + b + c;
    const double p11 = b / s, p22 = c / s;
    const cplx c12 = std::polar(std::sqrt(p11 * p22) * u(gen), 6.28 * u(gen));
    const PumpRates r{u(gen), u(gen), u(gen) - 0.5};
    const WhiteNoiseState st{a / s, p11, p22, c12};
    const auto d = rate_rhs(st, r);
    const auto ref = oracle::white_noise_rhs(st.rho_gg, p11, p22, c12, r.gamma_1, r.gamma_2,
                                             r.omega_12);
    CHECK(std::abs(d.rho_gg - ref.gg) < 1e-15);
    CHECK(std::abs(d.rho_11 - ref.p11) < 1e-15);
    CHECK(std::abs(d.rho_22 - ref.p22) < 1e-15);
    CHECK(std::abs(d.rho_12 - ref.c12) < 1e-15);
  }
}

TEST_CASE("no coherence is generated from the ground state") {
  const PumpRates r{0.25, 0.25, 0.05};
  const TimeGrid grid{0.0, 0.1, 1000};
  for (const auto& s : white_noise_trajectory(r, {}, grid, WhiteNoiseSolver::ClosedForm)) {
    CHECK(s.rho_12 == cplx(0.0, 0.0));
  }
  for (const auto& s : white_noise_trajectory(r, {}, grid, WhiteNoiseSolver::Adaptive)) {
    CHECK(std::abs(s.rho_12) < 1e-12);
  }
}

TEST_CASE("populations and purity equilibrate to one third") {
  const PumpRates r{0.25, 0.25, 0.0};
  const TimeGrid grid{0.0, 0.1, 1000};
  const auto obs = solve_white_noise(r, {}, grid);
  const std::size_t last = obs.size() - 1;
  CHECK(std::abs(obs.rho_gg[last] - 1.0 / 3.0) < 1e-6);
  CHECK(std::abs(obs.rho_11[last] - 1.0 / 3.0) < 1e-6);
  CHECK(std::abs(obs.rho_22[last] - 1.0 / 3.0) < 1e-6);
  CHECK(std::abs(obs.purity[last] - 1.0 / 3.0) < 1e-6);
  CHECK(obs.coherence_fraction[last] == 0.0);

  const auto asym = solve_white_noise({0.1, 0.3, 0.0}, {}, TimeGrid{0.0, 1.0, 400});
  CHECK(std::abs(asym.rho_11.back() - 1.0 / 3.0) < 1e-6);
  CHECK(std::abs(asym.rho_22.back() - 1.0 / 3.0) < 1e-6);
}

TEST_CASE("trace is conserved and equilibration is monotone") {
  const PumpRates r{0.3, 0.3, 0.0};
  const TimeGrid grid{0.0, 0.05, 2000};
  for (auto solver : {WhiteNoiseSolver::ClosedForm, WhiteNoiseSolver::Adaptive}) {
    const auto states = white_noise_trajectory(r, {}, grid, solver);
    double prev = 1.0;
    for (const auto& s : states) {
      CHECK(std::abs(s.trace() - 1.0) < 1e-9);
      const double dist = std::abs(s.rho_gg - 1.0 / 3.0);
      CHECK(dist <= prev + 1e-12);  // adaptive solver jitters near zero
      prev = dist;
    }
  }
}

TEST_CASE("closed form and adaptive solutions agree") {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(0.05, 0.5);
  for (int i = 0; i < 10; ++i) {
    const PumpRates r{u(gen), u(gen), u(gen) - 0.25};
    const double t_end = 10.0 / std::min(r.gamma_1, r.gamma_2);
    const TimeGrid grid = TimeGrid::covering(t_end, t_end / 500.0);
    const WhiteNoiseState init{0.2, 0.5, 0.3, std::polar(0.3, 1.0)};
    const auto a = white_noise_trajectory(r, init, grid, WhiteNoiseSolver::ClosedForm);
    const auto b = white_noise_trajectory(r, init, grid, WhiteNoiseSolver::Adaptive);
    double worst = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) worst = std::max(worst, max_diff(a[n], b[n]));
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("coherence decays with the homogeneous rate") {
  const PumpRates r{0.1, 0.2, 0.3};
  const WhiteNoiseState init{0.2, 0.4, 0.4, 0.25};
  const TimeGrid grid{0.0, 0.5, 40};
  const auto states = white_noise_trajectory(r, init, grid, WhiteNoiseSolver::ClosedForm);
  for (std::size_t n = 0; n < states.size(); ++n) {
    const double t = grid.time(n);
    const cplx ref = 0.25 * std::exp(cplx(-0.15 * t, -0.3 * t));
    CHECK(std::abs(states[n].rho_12 - ref) < 1e-14);
  }
}

TEST_CASE("steady state") {
  const auto s = steady_state({0.25, 0.25, 0.0});
  CHECK(s.rho_gg == doctest::Approx(1.0 / 3.0));
  CHECK(s.rho_12 == cplx(0.0, 0.0));

  const auto ref = oracle::steady_populations(0.1, 0.3);
  const auto t = steady_state({0.1, 0.3, 0.0});
  CHECK(std::abs(t.rho_gg - ref(0)) < 1e-12);
  CHECK(std::abs(t.rho_11 - ref(1)) < 1e-12);
  CHECK(std::abs(t.rho_22 - ref(2)) < 1e-12);

  CHECK_THROWS_AS(steady_state({0.25, 0.0, 0.0}), std::domain_error);
  CHECK_THROWS_AS(steady_state({-0.1, 0.2, 0.0}), std::invalid_argument);
}

TEST_CASE("invalid initial states are rejected") {
  const TimeGrid grid{0.0, 1.0, 3};
  const PumpRates r{0.1, 0.1, 0.0};
  CHECK_THROWS(white_noise_trajectory(r, {0.5, 0.5, 0.5, 0.0}, grid,
                                      WhiteNoiseSolver::ClosedForm));
  CHECK_THROWS(white_noise_trajectory(r, {0.2, 0.4, 0.4, 0.9}, grid,
                                      WhiteNoiseSolver::ClosedForm));
}
