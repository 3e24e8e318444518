#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "tdeform/analysis.hpp"
#include "tdeform/errors.hpp"

namespace tdeform {

namespace {

constexpr double kMinTangentNorm = 1e-300;

// Base point plus three tangent vectors, advanced together.
struct Augmented {
  State s;
  std::array<State, 3> v;
};

struct AugmentedRate {
  Augmented d;
  double trace;
};

AugmentedRate rate(const VectorField& f, const Augmented& u) {
  const Matrix3 j = f.jacobian(u.s);
  return {{f(u.s), {j * u.v[0], j * u.v[1], j * u.v[2]}}, j.trace()};
}

Augmented axpy(const Augmented& u, double h, const Augmented& k) {
  return {u.s + h * k.s, {u.v[0] + h * k.v[0], u.v[1] + h * k.v[1], u.v[2] + h * k.v[2]}};
}

bool is_finite(const Augmented& u) {
  return tdeform::is_finite(u.s) && tdeform::is_finite(u.v[0]) && tdeform::is_finite(u.v[1]) &&
         tdeform::is_finite(u.v[2]);
}

// One RK4 step of the 12-dimensional system. Returns the RK4-weighted
// integral of the Jacobian trace over the step.
double rk4_augmented(const VectorField& f, Augmented& u, double h) {
  const AugmentedRate k1 = rate(f, u);
  const AugmentedRate k2 = rate(f, axpy(u, 0.5 * h, k1.d));
  const AugmentedRate k3 = rate(f, axpy(u, 0.5 * h, k2.d));
  const AugmentedRate k4 = rate(f, axpy(u, h, k3.d));
  const double w = h / 6.0;
  u.s += w * (k1.d.s + 2.0 * k2.d.s + 2.0 * k3.d.s + k4.d.s);
  for (std::size_t i = 0; i < 3; ++i)
    u.v[i] += w * (k1.d.v[i] + 2.0 * k2.d.v[i] + 2.0 * k3.d.v[i] + k4.d.v[i]);
  return w * (k1.trace + 2.0 * k2.trace + 2.0 * k3.trace + k4.trace);
}

// Modified Gram-Schmidt in place; returns the norms removed from each vector.
std::array<double, 3> orthonormalize(std::array<State, 3>& v, double t) {
  std::array<double, 3> norms{};
  for (std::size_t i = 0; i < 3; ++i) {
    const double r = norm(v[i]);
    if (!std::isfinite(r)) {
      std::ostringstream msg;
      msg << "tangent vector " << i << " overflowed near t = " << t;
      throw NumericalError(NumericalFailure::Overflow, msg.str());
    }
    if (r < kMinTangentNorm) {
      std::ostringstream msg;
      msg << "tangent vector " << i << " collapsed (norm " << r << ") near t = " << t
          << "; reduce renorm_interval";
      throw NumericalError(NumericalFailure::DegenerateTangent, msg.str());
    }
    v[i] *= 1.0 / r;
    norms[i] = r;
    for (std::size_t k = i + 1; k < 3; ++k) v[k] -= dot(v[k], v[i]) * v[i];
  }
  return norms;
}

long long steps_for(double duration, double dt) { return std::llround(duration / dt); }

bool is_multiple(double value, double unit) {
  const double ratio = value / unit;
  return std::fabs(ratio - std::round(ratio)) <= 1e-6 * std::max(1.0, ratio) && std::round(ratio) >= 1.0;
}

}  // namespace

void LyapunovConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be > 0");
  if (!(transient >= 0.0) || !std::isfinite(transient))
    throw std::invalid_argument("transient must be >= 0");
  if (!(total_time > 0.0) || !std::isfinite(total_time))
    throw std::invalid_argument("total_time must be > 0");
  if (!(renorm_interval > 0.0) || !is_multiple(renorm_interval, dt))
    throw std::invalid_argument("renorm_interval must be a positive integer multiple of dt");
  if (!is_multiple(total_time, dt)) throw std::invalid_argument("total_time must be a multiple of dt");
  if (transient > 0.0 && !is_multiple(transient, dt))
    throw std::invalid_argument("transient must be a multiple of dt");
  if (!(history_interval > 0.0)) throw std::invalid_argument("history_interval must be > 0");
  if (!is_finite(initial_condition)) throw std::invalid_argument("initial condition must be finite");
}

LyapunovResult lyapunov_spectrum(const VectorField& f, const LyapunovConfig& cfg) {
  cfg.validate();
  if (!f.has_analytic_jacobian())
    throw std::invalid_argument("lyapunov_spectrum requires a field with an analytic Jacobian");

  const long long n_transient = cfg.transient > 0.0 ? steps_for(cfg.transient, cfg.dt) : 0;
  const long long n_accum = steps_for(cfg.total_time, cfg.dt);
  const long long n_total = n_transient + n_accum;
  const long long renorm_every = steps_for(cfg.renorm_interval, cfg.dt);
  const long long history_every = std::max(1LL, steps_for(cfg.history_interval, cfg.dt));

  Augmented u{cfg.initial_condition, {State{1, 0, 0}, State{0, 1, 0}, State{0, 0, 1}}};
  std::array<double, 3> log_sum{};
  double trace_integral = 0.0;
  long long next_history = history_every;

  LyapunovResult result;
  for (long long i = 1; i <= n_total; ++i) {
    const double trace_step = rk4_augmented(f, u, cfg.dt);
    const double t = static_cast<double>(i) * cfg.dt;
    if (!is_finite(u)) {
      std::ostringstream msg;
      msg << "trajectory escaped near t = " << t;
      throw NumericalError(NumericalFailure::Overflow, msg.str());
    }
    const bool accumulating = i > n_transient;
    if (accumulating) trace_integral += trace_step;

    if (i % renorm_every == 0 || i == n_transient || i == n_total) {
      const auto norms = orthonormalize(u.v, t);
      if (accumulating) {
        for (std::size_t k = 0; k < 3; ++k) log_sum[k] += std::log(norms[k]);
        const long long elapsed_steps = i - n_transient;
        if (elapsed_steps >= next_history || i == n_total) {
          const double elapsed = static_cast<double>(elapsed_steps) * cfg.dt;
          result.convergence_history.push_back(
              {elapsed, {log_sum[0] / elapsed, log_sum[1] / elapsed, log_sum[2] / elapsed}});
          while (next_history <= elapsed_steps) next_history += history_every;
        }
      }
    }
  }

  const double elapsed = static_cast<double>(n_accum) * cfg.dt;
  for (std::size_t k = 0; k < 3; ++k) result.exponents[k] = log_sum[k] / elapsed;
  std::sort(result.exponents.begin(), result.exponents.end(), std::greater<>());
  result.trace_average = trace_integral / elapsed;
  result.kaplan_yorke = kaplan_yorke(result.exponents);
  result.final_state = u.s;
  return result;
}

double kaplan_yorke(const std::array<double, 3>& exponents) {
  double partial = 0.0;
  for (std::size_t j = 0; j < 3; ++j) {
    const double next = partial + exponents[j];
    if (next < 0.0) {
      // j exponents keep the sum nonnegative; interpolate into the next one.
      return static_cast<double>(j) + partial / std::fabs(exponents[j]);
    }
    partial = next;
  }
  return 3.0;
}

std::vector<double> conservation_drift(const std::vector<ScalarField>& invariants,
                                       const Trajectory& traj) {
  if (traj.empty()) throw std::invalid_argument("conservation_drift requires a nonempty trajectory");
  std::vector<double> drift;
  drift.reserve(invariants.size());
  for (const auto& inv : invariants) {
    const double reference = inv.value(traj.states.front());
    double worst = 0.0;
    for (const State& s : traj.states) worst = std::max(worst, std::fabs(inv.value(s) - reference));
    drift.push_back(worst);
  }
  return drift;
}

}  // namespace tdeform
