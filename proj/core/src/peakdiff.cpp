#include "vetk/peakdiff.hpp"

#include <algorithm>
#include <cmath>

#include "vetk/errors.hpp"

namespace vetk {

namespace {

void require_pair(double f0, double f1) {
  if (!(f0 > 0.0 && f0 < 1.0)) throw DomainError("F0 must lie in (0, 1)");
  if (!(f1 >= 0.0 && f1 <= f0)) throw DomainError("F1 must lie in [0, F0]");
}

}  // namespace

double delta1(double f0, double f1) {
  require_pair(f0, f1);
  return f1 / f0 - std::log1p(-f1) / std::log1p(-f0);
}

double delta2(double f0, double f1) {
  require_pair(f0, f1);
  return std::log1p(-f1) / std::log1p(-f0) - f1 * (1.0 - f0) / (f0 * (1.0 - f1));
}

PeakDiffResult delta1_max(double f0) {
  if (!(f0 > 0.0 && f0 < 1.0)) throw DomainError("F0 must lie in (0, 1)");
  const double f1 = 1.0 + f0 / std::log1p(-f0);
  return {f0, f1, delta1(f0, std::clamp(f1, 0.0, f0))};
}

PeakDiffResult delta2_max(double f0) {
  if (!(f0 > 0.0 && f0 < 1.0)) throw DomainError("F0 must lie in (0, 1)");
  const double f1 = 1.0 + std::log1p(-f0) * (1.0 - f0) / f0;
  return {f0, f1, delta2(f0, std::clamp(f1, 0.0, f0))};
}

double verify_peak_equality(std::span<const double> f0_grid) {
  double worst = 0.0;
  for (double f0 : f0_grid) {
    worst = std::max(worst, std::abs(delta1_max(f0).delta_max - delta2_max(f0).delta_max));
  }
  return worst;
}

std::vector<Figure1Row> figure1_data(std::span<const double> f0_list, std::span<const double> ve_grid) {
  std::vector<Figure1Row> rows;
  rows.reserve(f0_list.size() * ve_grid.size());
  for (double f0 : f0_list) {
    if (!(f0 > 0.0 && f0 < 1.0)) throw DomainError("F0 must lie in (0, 1)");
    for (double ve : ve_grid) {
      if (!(ve >= 0.0 && ve <= 1.0)) throw DomainError("VE grid values must lie in [0, 1]");
      const double f1_ci = (1.0 - ve) * f0;
      const double f1_ch = -std::expm1((1.0 - ve) * std::log1p(-f0));
      rows.push_back({f0, ve, delta1(f0, std::min(f1_ci, f0)), delta2(f0, std::min(f1_ch, f0))});
    }
  }
  return rows;
}

}  // namespace vetk
