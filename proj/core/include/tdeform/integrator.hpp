#pragma once

#include <vector>

#include "tdeform/field.hpp"

namespace tdeform {

enum class StepMethod {
  FixedRk4,        ///< classical fourth-order Runge-Kutta with constant step
  DormandPrince54,  ///< embedded 5(4) pair with PI step-size control
  DormandPrince853  ///< embedded 8(5,3) pair, same controller; for tight tolerances
};

struct IntegrationConfig {
  double t0 = 0.0;
  double t_end = 1.0;
  StepMethod method = StepMethod::FixedRk4;

  // FixedRk4
  double dt = 1e-3;

  // DormandPrince54 / DormandPrince853
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  double dt_initial = 1e-3;
  double dt_max = 0.1;

  /// Output stride in time units; 0 records every step.
  double sample_every = 0.0;

  static IntegrationConfig fixed(double t0, double t_end, double dt, double sample_every = 0.0);
  static IntegrationConfig adaptive(double t0, double t_end, double abs_tol, double rel_tol,
                                    double sample_every = 0.0,
                                    StepMethod method = StepMethod::DormandPrince54);
  /// Adaptive high-order configuration used for conservation checks.
  static IntegrationConfig high_accuracy(double t0, double t_end, double tol, double sample_every = 0.0);

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
};

/// One classical RK4 step. Throws NumericalError(Overflow) if any stage or
/// the result is non-finite.
State rk4_step(const VectorField& f, const State& s, double t, double h);

/// Integrates f from s0 over [cfg.t0, cfg.t_end]. The first sample is s0 at
/// t0 and the last is the state at t_end. With a positive sample_every,
/// samples fall on t0 + k * sample_every (the adaptive method shortens steps
/// to land on them exactly; the fixed method records the first step at or
/// past each sample time).
///
/// Throws NumericalError(Overflow) on escape, NumericalError(StepUnderflow)
/// when the adaptive step shrinks below 1e-12.
Trajectory integrate(const VectorField& f, const State& s0, const IntegrationConfig& cfg);

}  // namespace tdeform
