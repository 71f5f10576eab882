#include "vcoh/ensemble_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "vcoh/rng.hpp"

namespace vcoh {

namespace {

void neumaier_add(double& sum, double& comp, double x) {
  const double t = sum + x;
  if (std::abs(sum) >= std::abs(x)) {
    comp += (sum - t) + x;
  } else {
    comp += (x - t) + sum;
  }
  sum = t;
}

void compensated_add(Matrix3c& sum, Matrix3c& comp, const Matrix3c& x) {
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double sr = sum(i, j).real(), si = sum(i, j).imag();
      double cr = comp(i, j).real(), ci = comp(i, j).imag();
      neumaier_add(sr, cr, x(i, j).real());
      neumaier_add(si, ci, x(i, j).imag());
      sum(i, j) = {sr, si};
      comp(i, j) = {cr, ci};
    }
  }
}

// Pairwise sum of group sums at output index o over groups [lo, hi).
Matrix3c pairwise_sum(std::span<const TrajectoryGroup> groups, std::size_t o) {
  if (groups.size() == 1) return groups[0].sum[o];
  const std::size_t mid = groups.size() / 2;
  return pairwise_sum(groups.subspan(0, mid), o) + pairwise_sum(groups.subspan(mid), o);
}

}  // namespace

DriveModel TrajectoryModel::drive_model() const {
  DriveConfig cfg = drive;
  cfg.extra_detuning_1 += fields[0].carrier_detuning;
  cfg.extra_detuning_2 += fields[1].carrier_detuning;
  return DriveModel(system(), cfg);
}

void EnsembleConfig::validate() const {
  if (n_trajectories < 2) {
    throw std::invalid_argument("ensemble: n_trajectories must be at least 2");
  }
  if (!(grid.dt > 0.0) || grid.n_steps == 0) {
    throw std::invalid_argument("ensemble: grid needs a positive dt and at least one step");
  }
  if (output_stride == 0 || grid.n_steps % output_stride != 0) {
    throw std::invalid_argument("ensemble: output_stride must divide the number of steps");
  }
  if (workers == 0) throw std::invalid_argument("ensemble: workers must be at least 1");
  scenario.system().validate();
  for (const auto& f : scenario.fields) f.validate();
  if (!scenario.initial.invariants().ok()) {
    throw std::invalid_argument("ensemble: initial state is not a valid density matrix");
  }
}

std::vector<double> EnsembleConfig::output_times() const {
  std::vector<double> t;
  for (std::size_t n = 0; n <= grid.n_steps; n += output_stride) t.push_back(grid.time(n));
  return t;
}

std::vector<Matrix3c> run_trajectory(const EnsembleConfig& cfg, std::size_t k) {
  const TrajectoryModel& model = cfg.scenario;
  const TimeGrid& grid = cfg.grid;
  FieldParams p1 = model.fields[0];
  FieldParams p2 = model.fields[1];
  p1.stream_id = field_stream(k, 0);
  p2.stream_id = field_stream(k, 1);
  const FieldRealization f1 = sample_field(p1, cfg.master_seed, grid);
  const FieldRealization f2 = sample_field(p2, cfg.master_seed, grid);

  const DriveModel frame = model.drive_model().stepping_frame();
  Propagator prop(model.method, grid.dt, model.rk4_substeps);

  std::vector<Matrix3c> out;
  out.reserve(grid.n_steps / cfg.output_stride + 1);
  Matrix3c rho = model.initial.matrix();
  out.push_back(frame.to_rotating_frame(rho, grid.t0));
  try {
    for (std::size_t n = 0; n < grid.n_steps; ++n) {
      const double t_mid = grid.time(n) + 0.5 * grid.dt;
      prop.step(rho, frame.hamiltonian(t_mid, f1.envelope[n], f2.envelope[n]));
      if ((n + 1) % cfg.output_stride == 0) {
        out.push_back(frame.to_rotating_frame(rho, grid.time(n + 1)));
      }
    }
  } catch (const StepSizeError& e) {
    throw TrajectoryError(k, e.what());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Accumulation

EnsembleAccumulator::EnsembleAccumulator(std::vector<double> output_times,
                                         std::size_t n_trajectories)
    : times_(std::move(output_times)), n_(n_trajectories) {
  if (n_ == 0) throw std::invalid_argument("ensemble accumulator: no trajectories");
  groups_.resize(std::min(n_, kMaxGroups));
  for (auto& g : groups_) {
    g.sum.assign(times_.size(), Matrix3c::Zero());
    g.comp.assign(times_.size(), Matrix3c::Zero());
  }
  for (std::size_t g = 0; g < groups_.size(); ++g) groups_[g].next = group_begin(g);
}

std::size_t EnsembleAccumulator::group_begin(std::size_t g) const {
  return g * n_ / groups_.size();
}

std::size_t EnsembleAccumulator::group_end(std::size_t g) const {
  return (g + 1) * n_ / groups_.size();
}

std::size_t EnsembleAccumulator::group_of(std::size_t k) const {
  std::size_t g = k * groups_.size() / n_;
  while (g + 1 < groups_.size() && group_begin(g + 1) <= k) ++g;
  while (g > 0 && group_begin(g) > k) --g;
  return g;
}

void EnsembleAccumulator::add(std::size_t k, std::span<const Matrix3c> states) {
  if (k >= n_) throw std::out_of_range("ensemble accumulator: trajectory index out of range");
  if (states.size() != times_.size()) {
    throw std::invalid_argument("ensemble accumulator: wrong number of output states");
  }
  Group& g = groups_[group_of(k)];
  if (k != g.next) {
    throw std::logic_error("ensemble accumulator: trajectories of a group must be added in order");
  }
  for (std::size_t o = 0; o < states.size(); ++o) compensated_add(g.sum[o], g.comp[o], states[o]);
  ++g.count;
  ++g.next;
}

EnsembleResult EnsembleAccumulator::finalize() const {
  std::vector<TrajectoryGroup> groups;
  groups.reserve(groups_.size());
  for (const auto& g : groups_) {
    if (g.count == 0) continue;
    TrajectoryGroup tg;
    tg.count = g.count;
    tg.sum.resize(g.sum.size());
    for (std::size_t o = 0; o < g.sum.size(); ++o) tg.sum[o] = g.sum[o] + g.comp[o];
    groups.push_back(std::move(tg));
  }
  return ensemble_from_groups(times_, std::move(groups));
}

EnsembleResult ensemble_from_groups(std::span<const double> output_times,
                                    std::vector<TrajectoryGroup> groups) {
  if (groups.empty()) throw std::invalid_argument("ensemble: no trajectory groups");
  const std::size_t n_out = output_times.size();
  std::size_t n = 0;
  for (const auto& g : groups) {
    if (g.sum.size() != n_out) throw std::invalid_argument("ensemble: group size mismatch");
    n += g.count;
  }

  EnsembleResult r;
  r.n_effective = n;
  r.mean_rho.reserve(n_out);
  r.observables.reserve(n_out);
  r.std_errors.resize(n_out);
  const std::size_t n_groups = groups.size();
  const double jk_scale = n_groups > 1 ? static_cast<double>(n_groups - 1) / n_groups : 0.0;

  std::vector<ObservableVector> leave_out(n_groups);
  for (std::size_t o = 0; o < n_out; ++o) {
    const Matrix3c total = pairwise_sum(groups, o);
    const DensityMatrix mean = DensityMatrix::unchecked(total / static_cast<double>(n));
    r.mean_rho.push_back(mean);
    r.observables.append(output_times[o], mean);

    if (n_groups < 2) continue;
    ObservableVector avg{};
    for (std::size_t g = 0; g < n_groups; ++g) {
      const double m = static_cast<double>(n - groups[g].count);
      leave_out[g] = observables_of(DensityMatrix::unchecked((total - groups[g].sum[o]) / m));
      for (std::size_t q = 0; q < kObservableCount; ++q) avg[q] += leave_out[g][q];
    }
    for (auto& a : avg) a /= static_cast<double>(n_groups);
    ObservableVector var{};
    for (std::size_t g = 0; g < n_groups; ++g) {
      for (std::size_t q = 0; q < kObservableCount; ++q) {
        const double d = leave_out[g][q] - avg[q];
        var[q] += d * d;
      }
    }
    const auto cols = r.std_errors.columns();
    for (std::size_t q = 0; q < kObservableCount; ++q) {
      (*cols[q])[o] = std::sqrt(jk_scale * var[q]);
    }
  }
  r.groups = std::move(groups);
  return r;
}

// ---------------------------------------------------------------------------
// Driver

EnsembleResult run_ensemble(const EnsembleConfig& cfg) {
  cfg.validate();
  EnsembleAccumulator acc(cfg.output_times(), cfg.n_trajectories);
  const std::size_t n_groups = acc.group_count();

  std::atomic<std::size_t> next_group{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::size_t error_trajectory = 0;
  std::mutex error_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::size_t g = next_group.fetch_add(1);
      if (g >= n_groups || failed.load()) return;
      for (std::size_t k = acc.group_begin(g); k < acc.group_end(g); ++k) {
        try {
          const auto states = run_trajectory(cfg, k);
          acc.add(k, states);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          // Keep the failure with the lowest trajectory index so the report is
          // the same for any worker count.
          if (!error || k < error_trajectory) {
            error = std::current_exception();
            error_trajectory = k;
          }
          failed.store(true);
          return;
        }
      }
    }
  };

  const unsigned n_workers =
      static_cast<unsigned>(std::min<std::size_t>(cfg.workers, n_groups));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return acc.finalize();
}

// ---------------------------------------------------------------------------
// Diagnostics

ConvergenceReport convergence_report(const EnsembleResult& result, std::uint64_t seed) {
  if (result.n_effective < 2) {
    throw std::invalid_argument("convergence report: need at least two trajectories");
  }
  ConvergenceReport rep;
  const auto cols = result.std_errors.columns();
  for (std::size_t q = 0; q < kObservableCount; ++q) {
    rep.max_std_error[q] =
        cols[q]->empty() ? 0.0 : *std::max_element(cols[q]->begin(), cols[q]->end());
  }

  const std::size_t n_groups = result.groups.size();
  if (n_groups < 4) return rep;
  rep.half_sample_applicable = true;

  std::vector<std::size_t> order(n_groups);
  std::iota(order.begin(), order.end(), 0);
  StreamRng rng(seed, 0);
  for (std::size_t i = n_groups - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i + 1));
    std::swap(order[i], order[std::min(j, i)]);
  }
  std::vector<TrajectoryGroup> half_a, half_b;
  for (std::size_t i = 0; i < n_groups; ++i) {
    (i < n_groups / 2 ? half_a : half_b).push_back(result.groups[order[i]]);
  }
  const auto& times = result.observables.t;
  const EnsembleResult a = ensemble_from_groups(times, std::move(half_a));
  const EnsembleResult b = ensemble_from_groups(times, std::move(half_b));

  std::size_t points = 0, outliers = 0;
  for (std::size_t o = 0; o < times.size(); ++o) {
    const ObservableVector va = observables_of(a.mean_rho[o]);
    const ObservableVector vb = observables_of(b.mean_rho[o]);
    const auto sa = a.std_errors.columns();
    const auto sb = b.std_errors.columns();
    for (std::size_t q = 0; q < kObservableCount; ++q) {
      const double diff = std::abs(va[q] - vb[q]);
      const double comb = std::hypot((*sa[q])[o], (*sb[q])[o]);
      ++points;
      if (comb > 0.0) {
        const double z = diff / comb;
        rep.half_sample_max_z[q] = std::max(rep.half_sample_max_z[q], z);
        if (z > 3.0) ++outliers;
      } else if (diff > 1e-12) {
        ++outliers;
      }
    }
  }
  rep.half_sample_outlier_fraction = static_cast<double>(outliers) / static_cast<double>(points);
  rep.half_sample_ok = rep.half_sample_outlier_fraction <= kHalfSampleOutlierLimit;
  return rep;
}

}  // namespace vcoh
