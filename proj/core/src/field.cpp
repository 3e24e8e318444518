#include "tdeform/field.hpp"

#include <cmath>

namespace tdeform {

double fallback_step(double component) { return std::fmax(1e-6, 1e-6 * std::fabs(component)); }

Matrix3 finite_difference_jacobian(const VectorField::EvalFn& f, const State& s) {
  Matrix3 j;
  for (std::size_t c = 0; c < 3; ++c) {
    const double h = fallback_step(s[c]);
    State plus = s;
    State minus = s;
    plus[c] += h;
    minus[c] -= h;
    // Use the actually representable spacing.
    const double width = plus[c] - minus[c];
    const State d = (1.0 / width) * (f(plus) - f(minus));
    for (std::size_t r = 0; r < 3; ++r) j(r, c) = d[r];
  }
  return j;
}

State finite_difference_gradient(const ScalarField::ValueFn& f, const State& s) {
  State g;
  for (std::size_t c = 0; c < 3; ++c) {
    const double h = fallback_step(s[c]);
    State plus = s;
    State minus = s;
    plus[c] += h;
    minus[c] -= h;
    g[c] = (f(plus) - f(minus)) / (plus[c] - minus[c]);
  }
  return g;
}

Matrix3 VectorField::jacobian(const State& s) const {
  if (jacobian_) return jacobian_(s);
  return finite_difference_jacobian(eval_, s);
}

VectorField VectorField::zero() {
  return VectorField([](const State&) { return State{}; }, [](const State&) { return Matrix3{}; });
}

VectorField VectorField::diagonal_linear(const State& d) {
  return VectorField([d](const State& s) { return State{d.x * s.x, d.y * s.y, d.z * s.z}; },
                     [d](const State&) { return Matrix3{{d.x, 0, 0, 0, d.y, 0, 0, 0, d.z}}; });
}

VectorField VectorField::linear(const Matrix3& m) {
  return VectorField([m](const State& s) { return m * s; }, [m](const State&) { return m; });
}

State ScalarField::gradient(const State& s) const {
  if (gradient_) return gradient_(s);
  return finite_difference_gradient(value_, s);
}

ScalarField ScalarField::constant(double c) {
  return ScalarField([c](const State&) { return c; }, [](const State&) { return State{}; });
}

ScalarField ScalarField::coordinate(int index) {
  const auto i = static_cast<std::size_t>(index);
  return ScalarField([i](const State& s) { return s[i]; },
                     [i](const State&) {
                       State g;
                       g[i] = 1.0;
                       return g;
                     });
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  if (a.has_analytic_gradient() && b.has_analytic_gradient()) {
    return ScalarField([a, b](const State& s) { return a.value(s) + b.value(s); },
                       [a, b](const State& s) { return a.gradient(s) + b.gradient(s); });
  }
  return ScalarField([a, b](const State& s) { return a.value(s) + b.value(s); });
}

ScalarField operator*(double k, const ScalarField& a) {
  if (a.has_analytic_gradient()) {
    return ScalarField([k, a](const State& s) { return k * a.value(s); },
                       [k, a](const State& s) { return k * a.gradient(s); });
  }
  return ScalarField([k, a](const State& s) { return k * a.value(s); });
}

}  // namespace tdeform
