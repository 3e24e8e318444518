#include "tdeform/sweep.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <thread>

#include "tdeform/errors.hpp"

namespace tdeform {

void SweepConfig::validate() const {
  if (!std::isfinite(g_min) || !std::isfinite(g_max) || !(g_min < g_max))
    throw std::invalid_argument("sweep requires finite g_min < g_max");
  if (n_points < 2) throw std::invalid_argument("sweep requires n_points >= 2");
  if (workers < 1) throw std::invalid_argument("sweep requires workers >= 1");
  tdeform::validate(base);
  lyapunov.validate();
}

double SweepConfig::grid_value(int i) const {
  if (i == n_points - 1) return g_max;
  const double frac = static_cast<double>(i) / static_cast<double>(n_points - 1);
  return g_min + frac * (g_max - g_min);
}

std::string_view to_string(SweepStatus s) {
  switch (s) {
    case SweepStatus::Ok:
      return "Ok";
    case SweepStatus::Escaped:
      return "Escaped";
    case SweepStatus::Degenerate:
      return "Degenerate";
  }
  return "Unknown";
}

namespace {

SweepRow evaluate(const SweepConfig& cfg, double g) {
  SweepRow row;
  row.g = g;
  try {
    const auto result = lyapunov_spectrum(particular_field({cfg.base, g}), cfg.lyapunov);
    row.full_spectrum = result.exponents;
    row.largest_exponent = result.exponents[0];
  } catch (const NumericalError& e) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    row.full_spectrum = {nan, nan, nan};
    row.largest_exponent = nan;
    row.status = e.kind() == NumericalFailure::DegenerateTangent ? SweepStatus::Degenerate
                                                                 : SweepStatus::Escaped;
  }
  return row;
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(cfg.n_points);
  std::vector<SweepRow> rows(n);

  // Each task writes only its own slot, so the result is independent of scheduling.
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t i = next++; i < n && !failed; i = next++) {
      try {
        rows[i] = evaluate(cfg, cfg.grid_value(static_cast<int>(i)));
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };

  const auto n_threads = std::min<std::size_t>(static_cast<std::size_t>(cfg.workers), n);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

double positive_fraction(const std::vector<SweepRow>& rows, double lo, double hi) {
  constexpr double slack = 1e-9;
  int total = 0, positive = 0;
  for (const auto& r : rows) {
    if (r.g < lo - slack || r.g > hi + slack) continue;
    ++total;
    if (r.status == SweepStatus::Ok && r.largest_exponent > 0.0) ++positive;
  }
  return total == 0 ? 0.0 : static_cast<double>(positive) / total;
}

}  // namespace tdeform
