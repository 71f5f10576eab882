#pragma once

// Closed three-level V system: |g>, |1>, |2>, with |g> coupled to both excited
// states by two optical fields and no direct 1-2 coupling.

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vcoh/time_grid.hpp"

namespace vcoh {

using cplx = std::complex<double>;
using Matrix3c = Eigen::Matrix3cd;
using Vector3c = Eigen::Vector3cd;

enum Level : int { kGround = 0, kExcited1 = 1, kExcited2 = 2 };

struct InvariantReport {
  double hermiticity_error = 0.0;  // max |rho - rho^dagger|
  double trace_error = 0.0;        // |Tr rho - 1|
  double min_eigenvalue = 0.0;

  bool ok(double herm_tol = 1e-12, double trace_tol = 1e-9, double psd_tol = 1e-9) const {
    return hermiticity_error < herm_tol && trace_error < trace_tol &&
           min_eigenvalue >= -psd_tol;
  }
};

// 3x3 density matrix in the basis (|g>, |1>, |2>).
class DensityMatrix {
 public:
  DensityMatrix() : rho_(Matrix3c::Zero()) { rho_(kGround, kGround) = 1.0; }

  // Throws std::invalid_argument if the matrix is not a valid state.
  static DensityMatrix from_matrix(const Matrix3c& m);
  // No validation; used for states produced by trusted arithmetic.
  static DensityMatrix unchecked(const Matrix3c& m) { return DensityMatrix(m); }

  static DensityMatrix pure(Level level);
  static DensityMatrix from_state_vector(const Vector3c& psi);
  static DensityMatrix maximally_mixed();

  const Matrix3c& matrix() const { return rho_; }
  cplx operator()(int i, int j) const { return rho_(i, j); }
  double population(Level level) const { return rho_(level, level).real(); }
  cplx excited_coherence() const { return rho_(kExcited1, kExcited2); }

  InvariantReport invariants() const;

 private:
  explicit DensityMatrix(const Matrix3c& m) : rho_(m) {}
  Matrix3c rho_;
};

// Tr[rho^2].
double purity(const DensityMatrix& rho);

// C = |rho_12| / (rho_11 + rho_22), defined as 0 when the excited population is
// below 1e-12.
double coherence_fraction(const DensityMatrix& rho);

inline constexpr double kDegenerateExcitedPopulation = 1e-12;

struct VSystemParams {
  double omega_21 = 0.0;  // excited-state splitting, rad/fs
  double rabi_1 = 0.0;    // coupling strength of field 1, rad/fs
  double rabi_2 = 0.0;    // coupling strength of field 2, rad/fs

  static VSystemParams from_tau_c(double tau_c, double rabi_1, double rabi_2);
  double tau_c() const;  // 2 pi / omega_21 (infinite for degenerate levels)
  void validate() const;
};

enum class CouplingScheme {
  Exclusive,     // field i drives only transition g-i
  CrossCoupled,  // each field drives both transitions
};

enum class CarrierScheme {
  PerTransition,  // carrier i resonant with transition g-i
  CommonCarrier,  // both carriers at the midpoint of the two transitions
};

std::string_view to_string(CouplingScheme s);
std::string_view to_string(CarrierScheme s);
CouplingScheme coupling_scheme_from_string(std::string_view name);
CarrierScheme carrier_scheme_from_string(std::string_view name);

struct DriveConfig {
  CouplingScheme coupling = CouplingScheme::Exclusive;
  CarrierScheme carrier = CarrierScheme::PerTransition;
  // Additional carrier offsets of each field (rad/fs).
  double extra_detuning_1 = 0.0;
  double extra_detuning_2 = 0.0;
};

// Carrier-minus-transition detunings and coupling pattern of a drive.
//
// The rotating frame is the interaction picture of diag(0, w1, w2). Field f
// couples to transition j as -rabi_f * env_f(t) * exp(i detuning(f, j) t) in
// the (g, j) element. A stepping frame additionally rotates excited level j at
// frequency shift(j); in that frame the coupling picks up exp(-i shift(j) t)
// and the diagonal gains -shift(j). When every transition is driven at one
// frequency the stepping-frame Hamiltonian only changes when an envelope does.
class DriveModel {
 public:
  DriveModel(const VSystemParams& sys, const DriveConfig& cfg);

  bool couples(int field, int transition) const { return couples_[field][transition]; }
  double detuning(int field, int transition) const { return detuning_[field][transition]; }
  double rabi(int field) const { return rabi_[field]; }
  double shift(int transition) const { return shift_[transition]; }

  // Rotating-frame representation (shift = 0).
  DriveModel rotating_frame() const;
  // Per-transition frame shifts chosen so the Hamiltonian is time independent
  // between envelope changes whenever each transition has a single driving
  // frequency.
  DriveModel stepping_frame() const;
  bool time_independent() const;

  Matrix3c hamiltonian(double t, cplx env1, cplx env2) const;

  // Maps a state in this model's frame at time t to the rotating frame.
  Matrix3c to_rotating_frame(const Matrix3c& rho, double t) const;

 private:
  DriveModel() = default;
  bool couples_[2][2] = {{false, false}, {false, false}};
  double detuning_[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  double rabi_[2] = {0.0, 0.0};
  double shift_[2] = {0.0, 0.0};
};

// Rotating-frame Hamiltonian at time t (hbar = 1, rad/fs). Throws
// std::invalid_argument if an envelope sample is not unit modulus.
Matrix3c build_hamiltonian(double t, const VSystemParams& sys, cplx env1, cplx env2,
                           const DriveConfig& cfg);

// Lab-frame Hamiltonian with explicit level energies (0, omega_1, omega_1 +
// omega_21) and real optical carriers, still within the RWA. Only used to
// check frame invariance.
Matrix3c build_lab_hamiltonian(double t, double omega_1, const VSystemParams& sys,
                               cplx env1, cplx env2, const DriveConfig& cfg);

enum class PropagationMethod { PiecewiseExp, RK4 };
std::string_view to_string(PropagationMethod m);
PropagationMethod propagation_method_from_string(std::string_view name);

class StepSizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Largest accepted dt * ||H||_2.
inline constexpr double kMaxPhasePerStep = 0.5;

// exp(-i H dt) for Hermitian H, via eigendecomposition.
Matrix3c step_unitary(const Matrix3c& h, double dt);

// Advances a density matrix through piecewise-constant Hamiltonians. The
// PiecewiseExp stepper caches the last propagator, so repeated identical
// Hamiltonians cost one matrix product pair per step.
class Propagator {
 public:
  Propagator(PropagationMethod method, double dt, int rk4_substeps = 1);

  // Throws StepSizeError if dt * ||H||_2 exceeds kMaxPhasePerStep.
  void step(Matrix3c& rho, const Matrix3c& h);

 private:
  PropagationMethod method_;
  double dt_;
  int substeps_;
  bool have_cache_ = false;
  Matrix3c cached_h_;
  Matrix3c cached_u_;
};

// Propagates rho0 through hamiltonian_path[n] on [t_n, t_{n+1}). Returns the
// state at every grid point (size n_steps + 1).
std::vector<DensityMatrix> propagate(const DensityMatrix& rho0,
                                     std::span<const Matrix3c> hamiltonian_path,
                                     const TimeGrid& grid, PropagationMethod method,
                                     int rk4_substeps = 1);

// Step-wise Hamiltonian path for a pair of envelope series: the envelope is
// held at its value at the start of each step and carrier phases are taken at
// the step midpoint.
std::vector<Matrix3c> hamiltonian_path(const DriveModel& model, const TimeGrid& grid,
                                       std::span<const cplx> env1,
                                       std::span<const cplx> env2);

}  // namespace vcoh
