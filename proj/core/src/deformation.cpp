#include "tdeform/deformation.hpp"

#include <utility>

namespace tdeform {

VectorField deform_generic(const VectorField& f, const ScalarField& mu, const ScalarField& h,
                           const ScalarField& c, const DeformationSpec& spec) {
  return VectorField([=](const State& s) {
    const State gh = h.gradient(s);
    const State gc = c.gradient(s);
    const State ga = spec.alpha.gradient(s);
    const State gb = spec.beta.gradient(s);
    const double m = mu.value(s);

    State out = f.eval(s);
    out.x += m * (gh.y * gb.z - gh.z * gb.y + ga.y * gc.z - ga.z * gc.y + ga.y * gb.z - ga.z * gb.y);
    out.y -= m * (gh.x * gb.z - gh.z * gb.x + ga.x * gc.z - ga.z * gc.x + ga.x * gb.z - ga.z * gb.x);
    out.z += m * (gh.x * gb.y - gh.y * gb.x + ga.x * gc.y - ga.y * gc.x + ga.x * gb.y - ga.y * gb.x);
    return out;
  });
}

VectorField deform_t(const TParams& p, const DeformationSpec& spec) {
  validate(p);
  const double a = p.a, b = p.b, c = p.c;
  return VectorField([=](const State& s) {
    const auto [x, y, z] = s;
    const State da = spec.alpha.gradient(s);
    const State db = spec.beta.gradient(s);
    return State{
        -a * x + a * y + x * (a * z * da.y - y * da.z + da.y * db.z - da.z * db.y),
        (c - a) * x - a * x * z - x * (db.z + a * z * da.x + da.x * db.z - da.z * db.x),
        -b * z + x * y + x * (db.y + y * da.x + da.x * db.y - da.y * db.x),
    };
  });
}

VectorField particular_field(const DeformedParams& dp) {
  validate(dp.base);
  const double a = dp.base.a, b = dp.base.b, c = dp.base.c, g = dp.g;
  return VectorField(
      [=](const State& s) {
        return State{-a * s.x + a * s.y - g * s.x * s.y, (c - a) * s.x - a * s.x * s.z,
                     -b * s.z + s.x * s.y};
      },
      [=](const State& s) {
        return Matrix3{{-a - g * s.y, a - g * s.x, 0.0,      //
                        (c - a) - a * s.z, 0.0, -a * s.x,  //
                        s.y, s.x, -b}};
      });
}

DeformationSpec linear_z_spec(double g) {
  return {g * ScalarField::coordinate(2), ScalarField::constant(0.0)};
}

double QuadraticPolynomial::value(const State& s) const {
  const auto& q = quadratic;
  return constant + linear[0] * s.x + linear[1] * s.y + linear[2] * s.z + q[0] * s.x * s.x +
         q[1] * s.x * s.y + q[2] * s.x * s.z + q[3] * s.y * s.y + q[4] * s.y * s.z + q[5] * s.z * s.z;
}

State QuadraticPolynomial::gradient(const State& s) const {
  const auto& q = quadratic;
  return {linear[0] + 2.0 * q[0] * s.x + q[1] * s.y + q[2] * s.z,
          linear[1] + q[1] * s.x + 2.0 * q[3] * s.y + q[4] * s.z,
          linear[2] + q[2] * s.x + q[4] * s.y + 2.0 * q[5] * s.z};
}

ScalarField QuadraticPolynomial::to_field() const {
  return ScalarField([p = *this](const State& s) { return p.value(s); },
                     [p = *this](const State& s) { return p.gradient(s); });
}

QuadraticPolynomial QuadraticPolynomial::random(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  QuadraticPolynomial p;
  p.constant = u(rng);
  for (auto& v : p.linear) v = u(rng);
  for (auto& v : p.quadratic) v = u(rng);
  return p;
}

DeformationSpec random_quadratic_spec(std::mt19937_64& rng, double scale) {
  auto alpha = QuadraticPolynomial::random(rng, scale).to_field();
  auto beta = QuadraticPolynomial::random(rng, scale).to_field();
  return {std::move(alpha), std::move(beta)};
}

}  // namespace tdeform
