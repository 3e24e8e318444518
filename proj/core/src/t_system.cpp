#include "tdeform/t_system.hpp"

#include <cmath>
#include <stdexcept>

namespace tdeform {

void validate(const TParams& p) {
  if (!std::isfinite(p.a) || !std::isfinite(p.b) || !std::isfinite(p.c))
    throw std::invalid_argument("T system parameters must be finite");
  if (p.a == 0.0) throw std::invalid_argument("T system requires a != 0");
}

VectorField t_field(const TParams& p) {
  validate(p);
  const double a = p.a, b = p.b, c = p.c;
  return VectorField(
      [=](const State& s) {
        return State{-a * s.x + a * s.y, (c - a) * s.x - a * s.x * s.z, -b * s.z + s.x * s.y};
      },
      [=](const State& s) {
        return Matrix3{{-a, a, 0.0,                          //
                        (c - a) - a * s.z, 0.0, -a * s.x,  //
                        s.y, s.x, -b}};
      });
}

VectorField hp_field(const TParams& p) {
  validate(p);
  const double a = p.a;
  return VectorField([=](const State& s) { return State{0.0, -a * s.x * s.z, s.x * s.y}; },
                     [=](const State& s) {
                       return Matrix3{{0.0, 0.0, 0.0,           //
                                       -a * s.z, 0.0, -a * s.x,  //
                                       s.y, s.x, 0.0}};
                     });
}

HamiltonCasimir hp_constants(const TParams& p) {
  const double a = p.a;
  return {ScalarField::coordinate(0),
          ScalarField([=](const State& s) { return 0.5 * s.y * s.y + 0.5 * a * s.z * s.z; },
                      [=](const State& s) { return State{0.0, s.y, a * s.z}; })};
}

VectorField cross_form(const ScalarField& mu, const ScalarField& h, const ScalarField& c) {
  return VectorField(
      [=](const State& s) { return mu.value(s) * cross(h.gradient(s), c.gradient(s)); });
}

std::vector<HamiltonPoissonPart> alternate_hp_parts(const TParams& p) {
  validate(p);
  const double a = p.a;
  ScalarField h([=](const State& s) { return 0.5 * s.x * s.x - a * s.z; },
                [=](const State& s) { return State{s.x, 0.0, -a}; });

  HamiltonPoissonPart first{
      VectorField(
          [=](const State& s) { return State{a * s.y, -a * s.x - a * s.x * s.z, s.x * s.y}; },
          [=](const State& s) {
            return Matrix3{{0.0, a, 0.0,                    //
                            -a - a * s.z, 0.0, -a * s.x,  //
                            s.y, s.x, 0.0}};
          }),
      h,
      ScalarField(
          [=](const State& s) { return 0.5 * s.x * s.x + 0.5 * s.y * s.y + 0.5 * a * s.z * s.z; },
          [=](const State& s) { return State{s.x, s.y, a * s.z}; })};

  HamiltonPoissonPart second{
      VectorField([=](const State& s) { return State{a * s.y, -a * s.x * s.z, s.x * s.y}; },
                  [=](const State& s) {
                    return Matrix3{{0.0, a, 0.0,           //
                                    -a * s.z, 0.0, -a * s.x,  //
                                    s.y, s.x, 0.0}};
                  }),
      h,
      ScalarField([=](const State& s) { return 0.5 * s.y * s.y + 0.5 * a * s.z * s.z; },
                  [=](const State& s) { return State{0.0, s.y, a * s.z}; })};

  return {std::move(first), std::move(second)};
}

double largest_gradient_minor(const ScalarField& h, const ScalarField& c, const State& s) {
  // The three 2x2 minors of [grad H; grad C] are the components of their cross product.
  return max_abs(cross(h.gradient(s), c.gradient(s)));
}

bool functionally_independent_at(const ScalarField& h, const ScalarField& c, const State& s) {
  return largest_gradient_minor(h, c, s) > 1e-10 * (1.0 + dot(s, s));
}

}  // namespace tdeform
