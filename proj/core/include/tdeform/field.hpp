#pragma once

#include <functional>
#include <utility>

#include "tdeform/types.hpp"

namespace tdeform {

/// Central-difference step used when no analytic derivative is supplied:
/// max(1e-6, 1e-6 * |component|).
double fallback_step(double component);

/// A smooth map R^3 -> R^3 paired with its Jacobian. When constructed
/// without a Jacobian, jacobian() falls back to central differences.
///
/// Immutable after construction; safe to share between threads as long as
/// the wrapped callables are themselves pure.
class VectorField {
 public:
  using EvalFn = std::function<State(const State&)>;
  using JacobianFn = std::function<Matrix3(const State&)>;

  VectorField() = default;
  explicit VectorField(EvalFn eval, JacobianFn jacobian = {})
      : eval_(std::move(eval)), jacobian_(std::move(jacobian)) {}

  State operator()(const State& s) const { return eval_(s); }
  State eval(const State& s) const { return eval_(s); }

  Matrix3 jacobian(const State& s) const;

  bool has_analytic_jacobian() const { return static_cast<bool>(jacobian_); }

  /// Copy of this field with the analytic Jacobian dropped.
  VectorField without_jacobian() const { return VectorField(eval_); }

  static VectorField zero();
  /// f(s) = diag(d) * s, with exact Jacobian.
  static VectorField diagonal_linear(const State& d);
  /// f(s) = m * s, with exact Jacobian.
  static VectorField linear(const Matrix3& m);

 private:
  EvalFn eval_;
  JacobianFn jacobian_;
};

/// A smooth map R^3 -> R paired with its gradient. Falls back to central
/// differences when no gradient is supplied.
class ScalarField {
 public:
  using ValueFn = std::function<double(const State&)>;
  using GradientFn = std::function<State(const State&)>;

  ScalarField() = default;
  explicit ScalarField(ValueFn value, GradientFn gradient = {})
      : value_(std::move(value)), gradient_(std::move(gradient)) {}

  double operator()(const State& s) const { return value_(s); }
  double value(const State& s) const { return value_(s); }

  State gradient(const State& s) const;

  bool has_analytic_gradient() const { return static_cast<bool>(gradient_); }

  ScalarField without_gradient() const { return ScalarField(value_); }

  static ScalarField constant(double c);
  /// The coordinate function s -> s[index].
  static ScalarField coordinate(int index);

  friend ScalarField operator+(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator*(double k, const ScalarField& a);

 private:
  ValueFn value_;
  GradientFn gradient_;
};

/// Central-difference Jacobian of an arbitrary map, columns perturbed one at a time.
Matrix3 finite_difference_jacobian(const VectorField::EvalFn& f, const State& s);
State finite_difference_gradient(const ScalarField::ValueFn& f, const State& s);

}  // namespace tdeform
