#pragma once

#include <array>
#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include "tdeform/deformation.hpp"
#include "tdeform/field.hpp"
#include "tdeform/integrator.hpp"

namespace tdeform {

using Eigenvalues = std::array<std::complex<double>, 3>;

enum class Stability {
  StableNode,
  StableFocus,
  UnstableNode,
  UnstableFocus,
  SaddlePoint,
  SaddleFocus,
  Center,
  NonHyperbolic,
};

std::string_view to_string(Stability s);

/// |Re(lambda)| below this counts as zero when classifying.
inline constexpr double kHyperbolicityTolerance = 1e-9;

struct Equilibrium {
  State point;
  Eigenvalues eigenvalues;  ///< sorted by real part, descending
  Stability classification = Stability::NonHyperbolic;
};

enum class SeedFailureKind { NoConvergence, SingularJacobian };

struct SeedFailure {
  State seed;
  SeedFailureKind kind;
};

struct EquilibriumSearch {
  std::vector<Equilibrium> equilibria;
  std::vector<SeedFailure> failures;
};

/// Damped Newton from each seed; roots closer than 1e-6 are merged. A seed
/// converges once |f| < min(tol, 1e-12 (1 + |p|)), or once damping stalls
/// with |f| already below tol. Per-seed failures are collected, not thrown.
EquilibriumSearch find_equilibria(const VectorField& f, const std::vector<State>& seeds, double tol);

/// Uniform grid of n^3 seeds over [lo, hi]^3.
std::vector<State> seed_grid(double lo, double hi, int n);

/// Equilibrium with eigenvalues and classification filled in from f's Jacobian.
Equilibrium make_equilibrium(const VectorField& f, const State& point);

struct ClosedFormEquilibria {
  std::vector<State> points;  ///< origin first, then the off-axis pair by ascending x
  bool complex_branch = false;  ///< off-axis pair not real; only the origin returned
};

/// Equilibria of particular_field solved by hand: z = (c-a)/a, x y = b(c-a)/a,
/// y - x = g b (c-a)/a^2, so x solves x^2 + (g b (c-a)/a^2) x - b(c-a)/a = 0.
ClosedFormEquilibria equilibria_closed_form(const DeformedParams& dp);

/// Roots of the characteristic cubic by Cardano's formula, each polished
/// with one Newton step. Sorted by real part descending, then imaginary
/// part descending; complex roots come as exact conjugate pairs.
Eigenvalues eigenvalues_3x3(const Matrix3& m);

Stability classify(const Eigenvalues& eigs);

struct LyapunovConfig {
  double transient = 100.0;
  double total_time = 5000.0;
  double renorm_interval = 0.1;
  double dt = 0.001;
  State initial_condition{0.01, 0.01, 14.01};
  /// Spacing of convergence_history samples, in time units of the
  /// accumulation window. Must be a multiple of renorm_interval.
  double history_interval = 10.0;

  /// Throws std::invalid_argument on the first violated constraint.
  void validate() const;
};

struct LyapunovSample {
  double time;  ///< elapsed accumulation time
  std::array<double, 3> exponents;
};

struct LyapunovResult {
  std::array<double, 3> exponents{};  ///< descending
  double kaplan_yorke = 0.0;
  double trace_average = 0.0;
  std::vector<LyapunovSample> convergence_history;
  State final_state;

  double exponent_sum() const { return exponents[0] + exponents[1] + exponents[2]; }
  double closure_residual() const { return std::abs(exponent_sum() - trace_average); }
};

/// Benettin-style spectrum: the state and three tangent vectors advance
/// together as one 12-dimensional RK4 system, with modified Gram-Schmidt
/// every renorm_interval. Requires an analytic Jacobian.
///
/// Throws NumericalError(Overflow) on escape and
/// NumericalError(DegenerateTangent) when a tangent norm drops below 1e-300.
LyapunovResult lyapunov_spectrum(const VectorField& f, const LyapunovConfig& cfg);

/// Kaplan-Yorke dimension of a descending spectrum.
double kaplan_yorke(const std::array<double, 3>& exponents);

/// Per invariant: max over samples of |I(s(t)) - I(s(0))|.
std::vector<double> conservation_drift(const std::vector<ScalarField>& invariants,
                                       const Trajectory& traj);

}  // namespace tdeform
