#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "tdeform/analysis.hpp"

namespace tdeform {

struct SweepConfig {
  double g_min = -1.2;
  double g_max = 1.2;
  int n_points = 121;
  TParams base;
  LyapunovConfig lyapunov;
  int workers = 1;

  void validate() const;
  /// The i-th grid value; endpoints are exact.
  double grid_value(int i) const;
};

enum class SweepStatus { Ok, Escaped, Degenerate };

std::string_view to_string(SweepStatus s);

struct SweepRow {
  double g = 0.0;
  double largest_exponent = 0.0;
  std::array<double, 3> full_spectrum{};
  SweepStatus status = SweepStatus::Ok;
};

/// Largest Lyapunov exponent of particular_field over an evenly spaced g
/// grid. Every point starts from the same initial condition. Points run on
/// `workers` threads; rows come back in ascending g and do not depend on
/// the worker count. Failed points carry a non-Ok status and NaN exponents.
std::vector<SweepRow> run_sweep(const SweepConfig& cfg);

/// Fraction of rows with g in [lo, hi] whose largest exponent is positive.
double positive_fraction(const std::vector<SweepRow>& rows, double lo, double hi);

}  // namespace tdeform
