#pragma once

// Monte Carlo ensemble of unitary trajectories. Each trajectory draws its two
// fields from disjoint random streams, propagates the V system, and the
// density matrices are averaged element-wise. The average is the physical
// state; its purity drops below one only through the averaging.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "vcoh/field_gen.hpp"
#include "vcoh/observables.hpp"
#include "vcoh/quantum_core.hpp"
#include "vcoh/time_grid.hpp"

namespace vcoh {

struct TrajectoryModel {
  double omega_21 = 0.0;  // rad/fs
  DriveConfig drive;
  std::array<FieldParams, 2> fields;
  DensityMatrix initial = DensityMatrix::pure(kGround);
  PropagationMethod method = PropagationMethod::PiecewiseExp;
  int rk4_substeps = 1;

  // Coupling strengths are taken from the fields.
  VSystemParams system() const {
    return {omega_21, fields[0].rabi_amplitude, fields[1].rabi_amplitude};
  }
  // Field carrier offsets are added to the drive's own offsets.
  DriveModel drive_model() const;
};

struct EnsembleConfig {
  std::size_t n_trajectories = 2;
  std::uint64_t master_seed = 0;
  TimeGrid grid;
  std::size_t output_stride = 1;  // record every output_stride-th grid point
  TrajectoryModel scenario;
  unsigned workers = 1;

  void validate() const;
  std::vector<double> output_times() const;
};

// Field f of trajectory k comes from stream 2k + f.
inline std::uint64_t field_stream(std::size_t trajectory, int field) {
  return 2 * static_cast<std::uint64_t>(trajectory) + static_cast<std::uint64_t>(field);
}

// Propagation failure inside the ensemble, tagged with the trajectory index.
class TrajectoryError : public StepSizeError {
 public:
  TrajectoryError(std::size_t trajectory, const std::string& what)
      : StepSizeError("trajectory " + std::to_string(trajectory) + ": " + what),
        trajectory_(trajectory) {}
  std::size_t trajectory() const { return trajectory_; }

 private:
  std::size_t trajectory_;
};

// Rotating-frame density matrices of trajectory k at the output times.
std::vector<Matrix3c> run_trajectory(const EnsembleConfig& cfg, std::size_t k);

struct TrajectoryGroup {
  std::size_t count = 0;
  std::vector<Matrix3c> sum;  // per output time
};

struct EnsembleResult {
  std::vector<DensityMatrix> mean_rho;
  ObservableSeries observables;  // of mean_rho
  ObservableErrors std_errors;   // delete-a-group jackknife
  std::size_t n_effective = 0;
  std::vector<TrajectoryGroup> groups;
};

// Upper bound on the number of trajectory groups used for the deterministic
// reduction and for the jackknife.
inline constexpr std::size_t kMaxGroups = 100;

// Collects per-trajectory states into fixed groups. Trajectory k always lands
// in the same group and every group is summed in trajectory order with
// compensated summation, so the result does not depend on how trajectories
// are distributed over workers. Different groups may be filled concurrently.
class EnsembleAccumulator {
 public:
  EnsembleAccumulator(std::vector<double> output_times, std::size_t n_trajectories);

  std::size_t group_count() const { return groups_.size(); }
  std::size_t group_begin(std::size_t g) const;
  std::size_t group_end(std::size_t g) const;

  // Must be called for the trajectories of a group in increasing order.
  void add(std::size_t trajectory, std::span<const Matrix3c> states);

  EnsembleResult finalize() const;

 private:
  struct Group {
    std::size_t count = 0;
    std::size_t next = 0;
    std::vector<Matrix3c> sum;
    std::vector<Matrix3c> comp;
  };
  std::size_t group_of(std::size_t trajectory) const;

  std::vector<double> times_;
  std::size_t n_;
  std::vector<Group> groups_;
};

// Result assembled from group sums (used by the accumulator and by resampling).
EnsembleResult ensemble_from_groups(std::span<const double> output_times,
                                    std::vector<TrajectoryGroup> groups);

EnsembleResult run_ensemble(const EnsembleConfig& cfg);

struct ConvergenceReport {
  ObservableVector max_std_error{};
  // Half-sample check: observables of two disjoint random halves of the groups
  // compared point by point against their combined standard error.
  bool half_sample_applicable = false;
  bool half_sample_ok = true;
  double half_sample_outlier_fraction = 0.0;  // points beyond 3 sigma
  ObservableVector half_sample_max_z{};
};

// Largest tolerated fraction of 3-sigma disagreements in the half-sample check
// (Gaussian expectation: 0.27%).
inline constexpr double kHalfSampleOutlierLimit = 0.01;

ConvergenceReport convergence_report(const EnsembleResult& result,
                                     std::uint64_t seed = 0);

}  // namespace vcoh
