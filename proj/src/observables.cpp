#include "vcoh/observables.hpp"

namespace vcoh {

void ObservableSeries::reserve(std::size_t n) {
  t.reserve(n);
  rho_gg.reserve(n);
  rho_11.reserve(n);
  rho_22.reserve(n);
  rho_12.reserve(n);
  abs_rho12.reserve(n);
  coherence_fraction.reserve(n);
  purity.reserve(n);
}

void ObservableSeries::append(double time, const DensityMatrix& rho) {
  t.push_back(time);
  rho_gg.push_back(rho.population(kGround));
  rho_11.push_back(rho.population(kExcited1));
  rho_22.push_back(rho.population(kExcited2));
  rho_12.push_back(rho.excited_coherence());
  abs_rho12.push_back(std::abs(rho.excited_coherence()));
  coherence_fraction.push_back(vcoh::coherence_fraction(rho));
  purity.push_back(vcoh::purity(rho));
}

void ObservableErrors::resize(std::size_t n) {
  for (auto* v : columns()) v->assign(n, 0.0);
}

std::array<std::vector<double>*, kObservableCount> ObservableErrors::columns() {
  return {&rho_gg,    &rho_11,    &rho_22,
          &re_rho12,  &im_rho12,  &abs_rho12,
          &coherence_fraction, &purity};
}

std::array<const std::vector<double>*, kObservableCount> ObservableErrors::columns() const {
  return {&rho_gg,    &rho_11,    &rho_22,
          &re_rho12,  &im_rho12,  &abs_rho12,
          &coherence_fraction, &purity};
}

ObservableVector observables_of(const DensityMatrix& rho) {
  const cplx c = rho.excited_coherence();
  return {rho.population(kGround),
          rho.population(kExcited1),
          rho.population(kExcited2),
          c.real(),
          c.imag(),
          std::abs(c),
          coherence_fraction(rho),
          purity(rho)};
}

}  // namespace vcoh
