#include "vcoh/quantum_core.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace vcoh {

namespace {

constexpr double kEnvelopeModulusTol = 1e-9;

void check_envelope(cplx env, const char* which) {
  if (std::abs(std::abs(env) - 1.0) > kEnvelopeModulusTol) {
    throw std::invalid_argument(std::string("hamiltonian: envelope ") + which +
                                " is not unit modulus (|env| = " +
                                std::to_string(std::abs(env)) + ")");
  }
}

Matrix3c commutator_rhs(const Matrix3c& h, const Matrix3c& rho) {
  // d rho / dt = -i [H, rho]
  return cplx(0.0, -1.0) * (h * rho - rho * h);
}

}  // namespace

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix DensityMatrix::from_matrix(const Matrix3c& m) {
  DensityMatrix rho(m);
  const InvariantReport r = rho.invariants();
  if (!r.ok()) {
    throw std::invalid_argument(
        "density matrix: invalid state (hermiticity error " +
        std::to_string(r.hermiticity_error) + ", trace error " +
        std::to_string(r.trace_error) + ", min eigenvalue " +
        std::to_string(r.min_eigenvalue) + ")");
  }
  return rho;
}

DensityMatrix DensityMatrix::pure(Level level) {
  Matrix3c m = Matrix3c::Zero();
  m(level, level) = 1.0;
  return DensityMatrix(m);
}

DensityMatrix DensityMatrix::from_state_vector(const Vector3c& psi) {
  const double n = psi.squaredNorm();
  if (!(n > 0.0)) throw std::invalid_argument("density matrix: zero state vector");
  return DensityMatrix(psi * psi.adjoint() / n);
}

DensityMatrix DensityMatrix::maximally_mixed() {
  return DensityMatrix(Matrix3c::Identity() / 3.0);
}

InvariantReport DensityMatrix::invariants() const {
  InvariantReport r;
  r.hermiticity_error = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
  r.trace_error = std::abs(rho_.trace() - cplx(1.0, 0.0));
  const Matrix3c herm = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix3c> es(herm, Eigen::EigenvaluesOnly);
  r.min_eigenvalue = es.eigenvalues().minCoeff();
  return r;
}

double purity(const DensityMatrix& rho) {
  // Tr[rho^2] = sum_ij rho_ij rho_ji = sum_ij |rho_ij|^2 for Hermitian rho.
  return (rho.matrix() * rho.matrix()).trace().real();
}

double coherence_fraction(const DensityMatrix& rho) {
  const double excited = rho.population(kExcited1) + rho.population(kExcited2);
  if (excited < kDegenerateExcitedPopulation) return 0.0;
  return std::abs(rho.excited_coherence()) / excited;
}

// ---------------------------------------------------------------------------
// Parameters

VSystemParams VSystemParams::from_tau_c(double tau_c, double rabi_1, double rabi_2) {
  if (!(tau_c > 0.0)) throw std::invalid_argument("v-system: tau_c must be positive");
  return VSystemParams{2.0 * std::numbers::pi / tau_c, rabi_1, rabi_2};
}

double VSystemParams::tau_c() const {
  return omega_21 > 0.0 ? 2.0 * std::numbers::pi / omega_21
                        : std::numeric_limits<double>::infinity();
}

void VSystemParams::validate() const {
  if (!(omega_21 >= 0.0) || !std::isfinite(omega_21)) {
    throw std::invalid_argument("v-system: omega_21 must be non-negative and finite");
  }
  if (!(rabi_1 >= 0.0) || !(rabi_2 >= 0.0) || !std::isfinite(rabi_1) ||
      !std::isfinite(rabi_2)) {
    throw std::invalid_argument("v-system: rabi frequencies must be non-negative and finite");
  }
}

std::string_view to_string(CouplingScheme s) {
  return s == CouplingScheme::Exclusive ? "exclusive" : "cross_coupled";
}

std::string_view to_string(CarrierScheme s) {
  return s == CarrierScheme::PerTransition ? "per_transition" : "common_carrier";
}

CouplingScheme coupling_scheme_from_string(std::string_view name) {
  if (name == "exclusive") return CouplingScheme::Exclusive;
  if (name == "cross_coupled") return CouplingScheme::CrossCoupled;
  throw std::invalid_argument("unknown coupling scheme '" + std::string(name) +
                              "' (expected exclusive or cross_coupled)");
}

CarrierScheme carrier_scheme_from_string(std::string_view name) {
  if (name == "per_transition") return CarrierScheme::PerTransition;
  if (name == "common_carrier") return CarrierScheme::CommonCarrier;
  throw std::invalid_argument("unknown carrier scheme '" + std::string(name) +
                              "' (expected per_transition or common_carrier)");
}

std::string_view to_string(PropagationMethod m) {
  return m == PropagationMethod::PiecewiseExp ? "piecewise_exp" : "rk4";
}

PropagationMethod propagation_method_from_string(std::string_view name) {
  if (name == "piecewise_exp") return PropagationMethod::PiecewiseExp;
  if (name == "rk4") return PropagationMethod::RK4;
  throw std::invalid_argument("unknown propagation method '" + std::string(name) +
                              "' (expected piecewise_exp or rk4)");
}

// ---------------------------------------------------------------------------
// Drive model

DriveModel::DriveModel(const VSystemParams& sys, const DriveConfig& cfg) {
  sys.validate();
  // Transition frequencies relative to w1: (0, w21).
  const double transition[2] = {0.0, sys.omega_21};
  double carrier[2];
  if (cfg.carrier == CarrierScheme::PerTransition) {
    carrier[0] = transition[0];
    carrier[1] = transition[1];
  } else {
    carrier[0] = carrier[1] = 0.5 * sys.omega_21;
  }
  carrier[0] += cfg.extra_detuning_1;
  carrier[1] += cfg.extra_detuning_2;
  rabi_[0] = sys.rabi_1;
  rabi_[1] = sys.rabi_2;
  for (int f = 0; f < 2; ++f) {
    for (int j = 0; j < 2; ++j) {
      couples_[f][j] = cfg.coupling == CouplingScheme::CrossCoupled || f == j;
      detuning_[f][j] = carrier[f] - transition[j];
    }
  }
}

DriveModel DriveModel::rotating_frame() const {
  DriveModel m = *this;
  m.shift_[0] = m.shift_[1] = 0.0;
  return m;
}

DriveModel DriveModel::stepping_frame() const {
  DriveModel m = *this;
  for (int j = 0; j < 2; ++j) {
    m.shift_[j] = 0.0;
    const int primary = couples_[j][j] ? j : 1 - j;
    if (couples_[primary][j]) m.shift_[j] = detuning_[primary][j];
  }
  return m;
}

bool DriveModel::time_independent() const {
  for (int f = 0; f < 2; ++f) {
    for (int j = 0; j < 2; ++j) {
      if (couples_[f][j] && detuning_[f][j] != shift_[j]) return false;
    }
  }
  return true;
}

Matrix3c DriveModel::hamiltonian(double t, cplx env1, cplx env2) const {
  const cplx env[2] = {env1, env2};
  Matrix3c h = Matrix3c::Zero();
  for (int j = 0; j < 2; ++j) {
    cplx coupling = 0.0;
    for (int f = 0; f < 2; ++f) {
      if (!couples_[f][j] || rabi_[f] == 0.0) continue;
      const double freq = detuning_[f][j] - shift_[j];
      const cplx carrier = freq == 0.0 ? cplx(1.0, 0.0) : std::polar(1.0, freq * t);
      coupling -= rabi_[f] * env[f] * carrier;
    }
    h(kGround, 1 + j) = coupling;
    h(1 + j, kGround) = std::conj(coupling);
    h(1 + j, 1 + j) = -shift_[j];
  }
  return h;
}

Matrix3c DriveModel::to_rotating_frame(const Matrix3c& rho, double t) const {
  if (shift_[0] == 0.0 && shift_[1] == 0.0) return rho;
  const cplx w[3] = {cplx(1.0, 0.0), std::polar(1.0, -shift_[0] * t),
                     std::polar(1.0, -shift_[1] * t)};
  Matrix3c out;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) out(i, j) = w[i] * rho(i, j) * std::conj(w[j]);
  }
  return out;
}

Matrix3c build_hamiltonian(double t, const VSystemParams& sys, cplx env1, cplx env2,
                           const DriveConfig& cfg) {
  check_envelope(env1, "1");
  check_envelope(env2, "2");
  return DriveModel(sys, cfg).hamiltonian(t, env1, env2);
}

Matrix3c build_lab_hamiltonian(double t, double omega_1, const VSystemParams& sys,
                               cplx env1, cplx env2, const DriveConfig& cfg) {
  check_envelope(env1, "1");
  check_envelope(env2, "2");
  const DriveModel model(sys, cfg);
  const double level[3] = {0.0, omega_1, omega_1 + sys.omega_21};
  const cplx env[2] = {env1, env2};
  Matrix3c h = Matrix3c::Zero();
  for (int i = 0; i < 3; ++i) h(i, i) = level[i];
  for (int j = 0; j < 2; ++j) {
    cplx coupling = 0.0;
    for (int f = 0; f < 2; ++f) {
      if (!model.couples(f, j)) continue;
      const double carrier = level[1 + j] + model.detuning(f, j);
      coupling -= model.rabi(f) * env[f] * std::polar(1.0, carrier * t);
    }
    h(kGround, 1 + j) = coupling;
    h(1 + j, kGround) = std::conj(coupling);
  }
  return h;
}

// ---------------------------------------------------------------------------
// Propagation

Matrix3c step_unitary(const Matrix3c& h, double dt) {
  Eigen::SelfAdjointEigenSolver<Matrix3c> es(h);
  const Eigen::Vector3d& lambda = es.eigenvalues();
  Vector3c phase;
  for (int i = 0; i < 3; ++i) phase(i) = std::polar(1.0, -lambda(i) * dt);
  const Matrix3c& v = es.eigenvectors();
  return v * phase.asDiagonal() * v.adjoint();
}

Propagator::Propagator(PropagationMethod method, double dt, int rk4_substeps)
    : method_(method), dt_(dt), substeps_(rk4_substeps) {
  if (!(dt > 0.0)) throw std::invalid_argument("propagator: dt must be positive");
  if (rk4_substeps < 1) throw std::invalid_argument("propagator: substeps must be >= 1");
}

void Propagator::step(Matrix3c& rho, const Matrix3c& h) {
  if (!have_cache_ || !(h == cached_h_)) {
    Eigen::SelfAdjointEigenSolver<Matrix3c> es(
        h, method_ == PropagationMethod::PiecewiseExp ? Eigen::ComputeEigenvectors
                                                      : Eigen::EigenvaluesOnly);
    const double norm = es.eigenvalues().cwiseAbs().maxCoeff();
    if (dt_ * norm > kMaxPhasePerStep) {
      throw StepSizeError("propagator: dt * ||H|| = " + std::to_string(dt_ * norm) +
                          " exceeds " + std::to_string(kMaxPhasePerStep));
    }
    if (method_ == PropagationMethod::PiecewiseExp) {
      Vector3c phase;
      for (int i = 0; i < 3; ++i) phase(i) = std::polar(1.0, -es.eigenvalues()(i) * dt_);
      cached_u_ = es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
    }
    cached_h_ = h;
    have_cache_ = true;
  }

  if (method_ == PropagationMethod::PiecewiseExp) {
    rho = cached_u_ * rho * cached_u_.adjoint();
  } else {
    const double hs = dt_ / substeps_;
    for (int s = 0; s < substeps_; ++s) {
      const Matrix3c k1 = commutator_rhs(h, rho);
      const Matrix3c k2 = commutator_rhs(h, rho + 0.5 * hs * k1);
      const Matrix3c k3 = commutator_rhs(h, rho + 0.5 * hs * k2);
      const Matrix3c k4 = commutator_rhs(h, rho + hs * k3);
      rho += (hs / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  // Remove the anti-Hermitian rounding residue.
  rho = 0.5 * (rho + rho.adjoint()).eval();
}

std::vector<DensityMatrix> propagate(const DensityMatrix& rho0,
                                     std::span<const Matrix3c> hamiltonian_path,
                                     const TimeGrid& grid, PropagationMethod method,
                                     int rk4_substeps) {
  if (!rho0.invariants().ok()) {
    throw std::invalid_argument("propagate: initial state is not a valid density matrix");
  }
  if (hamiltonian_path.size() != grid.n_steps) {
    throw std::invalid_argument("propagate: path has " +
                                std::to_string(hamiltonian_path.size()) +
                                " steps but the grid has " + std::to_string(grid.n_steps));
  }
  Propagator prop(method, grid.dt, rk4_substeps);
  std::vector<DensityMatrix> out;
  out.reserve(grid.size());
  Matrix3c rho = rho0.matrix();
  out.push_back(rho0);
  for (std::size_t n = 0; n < grid.n_steps; ++n) {
    prop.step(rho, hamiltonian_path[n]);
    out.push_back(DensityMatrix::unchecked(rho));
  }
  return out;
}

std::vector<Matrix3c> hamiltonian_path(const DriveModel& model, const TimeGrid& grid,
                                       std::span<const cplx> env1,
                                       std::span<const cplx> env2) {
  if (env1.size() < grid.n_steps || env2.size() < grid.n_steps) {
    throw std::invalid_argument("hamiltonian path: envelope shorter than the grid");
  }
  std::vector<Matrix3c> path;
  path.reserve(grid.n_steps);
  for (std::size_t n = 0; n < grid.n_steps; ++n) {
    check_envelope(env1[n], "1");
    check_envelope(env2[n], "2");
    path.push_back(model.hamiltonian(grid.time(n) + 0.5 * grid.dt, env1[n], env2[n]));
  }
  return path;
}

}  // namespace vcoh
