#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <string_view>
#include <vector>

#include "vcoh/quantum_core.hpp"

namespace vcoh {

// Time series of the scalar observables of a V-system state.
struct ObservableSeries {
  std::vector<double> t;  // fs
  std::vector<double> rho_gg;
  std::vector<double> rho_11;
  std::vector<double> rho_22;
  std::vector<cplx> rho_12;
  std::vector<double> abs_rho12;
  std::vector<double> coherence_fraction;
  std::vector<double> purity;

  std::size_t size() const { return t.size(); }
  void reserve(std::size_t n);
  void append(double time, const DensityMatrix& rho);
};

// Scalar observables of one state, in CSV column order after t_fs.
inline constexpr std::size_t kObservableCount = 8;
inline constexpr std::string_view kObservableNames[kObservableCount] = {
    "rho_gg",    "rho_11",    "rho_22",
    "re_rho12",  "im_rho12",  "abs_rho12",
    "coherence_fraction", "purity"};

using ObservableVector = std::array<double, kObservableCount>;
// Standard errors, one series per observable column.
struct ObservableErrors {
  std::vector<double> rho_gg;
  std::vector<double> rho_11;
  std::vector<double> rho_22;
  std::vector<double> re_rho12;
  std::vector<double> im_rho12;
  std::vector<double> abs_rho12;
  std::vector<double> coherence_fraction;
  std::vector<double> purity;

  void resize(std::size_t n);
  // In kObservableNames order.
  std::array<std::vector<double>*, kObservableCount> columns();
  std::array<const std::vector<double>*, kObservableCount> columns() const;
};

ObservableVector observables_of(const DensityMatrix& rho);

}  // namespace vcoh
