#pragma once

#include <array>
#include <random>

#include "tdeform/field.hpp"
#include "tdeform/t_system.hpp"

namespace tdeform {

/// The deformation functions: H is replaced by H + alpha, C by C + beta.
struct DeformationSpec {
  ScalarField alpha = ScalarField::constant(0.0);
  ScalarField beta = ScalarField::constant(0.0);
};

/// T-system parameters plus the deformation parameter g of the
/// alpha = g z, beta = 0 family.
struct DeformedParams {
  TParams base;
  double g = 0.0;
};

/// f + mu * (grad H x grad beta + grad alpha x grad C + grad alpha x grad beta).
///
/// The added term is what turns the integrable part mu grad H x grad C into
/// mu grad(H + alpha) x grad(C + beta); the rest of f is left untouched.
/// Only first derivatives of alpha and beta are needed. The resulting field
/// has no analytic Jacobian.
VectorField deform_generic(const VectorField& f, const ScalarField& mu, const ScalarField& h,
                           const ScalarField& c, const DeformationSpec& spec);

/// Deformation of the T system with mu = x, H = x, C = y^2/2 + a z^2/2,
/// written out componentwise. Jacobian by finite differences.
VectorField deform_t(const TParams& p, const DeformationSpec& spec);

/// The alpha = g z, beta = 0 deformation:
///   x' = -a x + a y - g x y,  y' = (c - a) x - a x z,  z' = -b z + x y
/// with its exact Jacobian. Throws std::invalid_argument on a = 0.
VectorField particular_field(const DeformedParams& dp);

/// The spec (alpha = g z, beta = 0) that produces particular_field.
DeformationSpec linear_z_spec(double g);

/// Polynomial of total degree <= 2 in (x, y, z):
///   c0 + l . s + sum_{i<=j} q_ij s_i s_j
struct QuadraticPolynomial {
  double constant = 0.0;
  std::array<double, 3> linear{};
  /// Coefficients of xx, xy, xz, yy, yz, zz.
  std::array<double, 6> quadratic{};

  double value(const State& s) const;
  State gradient(const State& s) const;
  ScalarField to_field() const;

  /// Every coefficient drawn uniformly from [-scale, scale].
  static QuadraticPolynomial random(std::mt19937_64& rng, double scale = 1.0);
};

/// Random spec with independent quadratic alpha and beta.
DeformationSpec random_quadratic_spec(std::mt19937_64& rng, double scale = 1.0);

}  // namespace tdeform
