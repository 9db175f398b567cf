#pragma once

#include <span>
#include <vector>

namespace vetk {

/// VE_CH - VE_CI as a function of the two attack rates, 0 <= f1 <= f0 < 1.
double delta1(double f0, double f1);
/// VE_odds - VE_CH.
double delta2(double f0, double f1);

struct PeakDiffResult {
  double f0;
  double f1_argmax;
  double delta_max;
};

/// argmax F1 = 1 + F0 / ln(1 - F0).
PeakDiffResult delta1_max(double f0);
/// argmax F1 = 1 + ln(1 - F0) (1 - F0) / F0.
PeakDiffResult delta2_max(double f0);

/// max |delta1_max - delta2_max| over the grid.
double verify_peak_equality(std::span<const double> f0_grid);

struct Figure1Row {
  double f0;
  double ve;       // x value: VE_CI for delta1, VE_CH for delta2
  double delta1;   // VE_CH - VE_CI at VE_CI = ve
  double delta2;   // VE_odds - VE_CH at VE_CH = ve
};

std::vector<Figure1Row> figure1_data(std::span<const double> f0_list, std::span<const double> ve_grid);

}  // namespace vetk
