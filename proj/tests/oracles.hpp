#pragma once

// Reference formulas written independently of the library, used as test oracles.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>

namespace oracle {

using cplx = std::complex<double>;
using M3 = Eigen::Matrix3cd;

// Two-level system, H = [[0, -W], [-W, 0]], starting in the ground state.
inline double rabi_excited_population(double rabi, double t) {
  const double s = std::sin(rabi * t);
  return s * s;
}

// Population/coherence equations of the white-noise model, term by term.
struct Rates {
  double gg, p11, p22;
  cplx c12;
};

inline Rates white_noise_rhs(double gg, double p11, double p22, cplx c12, double g1, double g2,
                             double w12) {
  Rates d;
  d.gg = g1 * p11 + g2 * p22 - (g1 + g2) * gg;
  d.p11 = g1 * (gg - p11);
  d.p22 = g2 * (gg - p22);
  d.c12 = -cplx(0.0, 1.0) * w12 * c12 - 0.5 * (g1 + g2) * c12;
  return d;
}

// Normalized kernel vector of the population generator.
inline Eigen::Vector3d steady_populations(double g1, double g2) {
  Eigen::Matrix3d a;
  a << -(g1 + g2), g1, g2,
       g1, -g1, 0.0,
       g2, 0.0, -g2;
  Eigen::FullPivLU<Eigen::Matrix3d> lu(a);
  Eigen::Vector3d k = lu.kernel().col(0);
  return k / k.sum();
}

// Rotating-frame Hamiltonian, transcribed from the lab-frame RWA model
// H = diag(0, w1, w2) - sum_f rabi_f env_f e^{i nu_f t} |g><j| + h.c.
// transformed by W = diag(1, e^{-i w1 t}, e^{-i w2 t}).
// carrier: 0 per-transition, 1 common midpoint. cross: each field drives both.
inline M3 rotating_hamiltonian(double t, double w21, double rabi1, double rabi2, cplx e1,
                               cplx e2, int carrier, bool cross) {
  const double w1 = 0.0, w2 = w21;  // relative to w1, which drops out
  const double nu1 = carrier == 0 ? w1 : 0.5 * (w1 + w2);
  const double nu2 = carrier == 0 ? w2 : 0.5 * (w1 + w2);
  M3 h = M3::Zero();
  auto add = [&](int j, double rabi, cplx env, double nu, double wj) {
    h(0, j) += -rabi * env * std::polar(1.0, (nu - wj) * t);
  };
  add(1, rabi1, e1, nu1, w1);
  add(2, rabi2, e2, nu2, w2);
  if (cross) {
    add(2, rabi1, e1, nu1, w2);
    add(1, rabi2, e2, nu2, w1);
  }
  h(1, 0) = std::conj(h(0, 1));
  h(2, 0) = std::conj(h(0, 2));
  return h;
}

// Lab-frame counterpart with absolute level energies (0, w1, w1 + w21).
inline M3 lab_hamiltonian(double t, double w1, double w21, double rabi1, double rabi2, cplx e1,
                          cplx e2, int carrier, bool cross) {
  const double w2 = w1 + w21;
  const double nu1 = carrier == 0 ? w1 : 0.5 * (w1 + w2);
  const double nu2 = carrier == 0 ? w2 : 0.5 * (w1 + w2);
  M3 h = M3::Zero();
  h(1, 1) = w1;
  h(2, 2) = w2;
  h(0, 1) = -rabi1 * e1 * std::polar(1.0, nu1 * t);
  h(0, 2) = -rabi2 * e2 * std::polar(1.0, nu2 * t);
  if (cross) {
    h(0, 2) += -rabi1 * e1 * std::polar(1.0, nu1 * t);
    h(0, 1) += -rabi2 * e2 * std::polar(1.0, nu2 * t);
  }
  h(1, 0) = std::conj(h(0, 1));
  h(2, 0) = std::conj(h(0, 2));
  return h;
}

// One classical RK4 step of d rho/dt = -i [H(t), rho] with H sampled at t, t+dt/2, t+dt.
template <typename HFn>
M3 rk4_step(const M3& rho, double t, double dt, HFn&& hfn) {
  const cplx mi(0.0, -1.0);
  auto f = [&](double s, const M3& r) -> M3 {
    const M3 h = hfn(s);
    return mi * (h * r - r * h);
  };
  const M3 k1 = f(t, rho);
  const M3 k2 = f(t + 0.5 * dt, rho + 0.5 * dt * k1);
  const M3 k3 = f(t + 0.5 * dt, rho + 0.5 * dt * k2);
  const M3 k4 = f(t + dt, rho + dt * k3);
  return rho + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace oracle
