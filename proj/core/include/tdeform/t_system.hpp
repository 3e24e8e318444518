#pragma once

#include <vector>

#include "tdeform/field.hpp"

namespace tdeform {

/// Parameters (a, b, c) of the T system
///   x' = -a x + a y,  y' = (c - a) x - a x z,  z' = -b z + x y.
struct TParams {
  double a = 2.0;
  double b = 0.2;
  double c = 30.0;
};

/// Throws std::invalid_argument unless a != 0 and all parameters are finite.
void validate(const TParams& p);

/// The full T system with its exact Jacobian.
VectorField t_field(const TParams& p);

/// Hamilton-Poisson part of the T system: (0, -a x z, x y).
VectorField hp_field(const TParams& p);

/// The pair of first integrals of hp_field.
struct HamiltonCasimir {
  ScalarField hamiltonian;  ///< H = x
  ScalarField casimir;      ///< C = y^2/2 + a z^2/2
};

HamiltonCasimir hp_constants(const TParams& p);

/// s -> mu(s) * (grad H(s) x grad C(s)). The Jacobian is left to the
/// finite-difference fallback.
VectorField cross_form(const ScalarField& mu, const ScalarField& h, const ScalarField& c);

/// One way of splitting the T system into an integrable part and the rest.
struct HamiltonPoissonPart {
  VectorField field;
  ScalarField hamiltonian;
  ScalarField casimir;
};

/// The two non-default splittings:
///   g = (a y, -a x - a x z, x y),  H = x^2/2 - a z,  C = x^2/2 + y^2/2 + a z^2/2
///   g = (a y, -a x z, x y),        H = x^2/2 - a z,  C = y^2/2 + a z^2/2
std::vector<HamiltonPoissonPart> alternate_hp_parts(const TParams& p);

/// Largest |2x2 minor| of the 2x3 matrix stacking grad H and grad C at s.
double largest_gradient_minor(const ScalarField& h, const ScalarField& c, const State& s);

/// True when grad H and grad C have rank 2 at s, i.e. the largest 2x2 minor
/// exceeds 1e-10 * (1 + |s|^2).
bool functionally_independent_at(const ScalarField& h, const ScalarField& c, const State& s);

}  // namespace tdeform
