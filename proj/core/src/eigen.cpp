#include <algorithm>
#include <cmath>
#include <numbers>

#include "tdeform/analysis.hpp"

namespace tdeform {

namespace {

using cplx = std::complex<double>;

// Monic characteristic polynomial lambda^3 + c2 lambda^2 + c1 lambda + c0.
struct Cubic {
  double c2, c1, c0;

  cplx value(cplx x) const { return ((x + c2) * x + c1) * x + c0; }
  cplx derivative(cplx x) const { return (3.0 * x + 2.0 * c2) * x + c1; }

  cplx polish(cplx x) const {
    const cplx d = derivative(x);
    if (std::abs(d) == 0.0) return x;
    const cplx next = x - value(x) / d;
    if (!std::isfinite(next.real()) || !std::isfinite(next.imag())) return x;
    return std::abs(value(next)) <= std::abs(value(x)) ? next : x;
  }
};

bool is_real(const cplx& z) { return z.imag() == 0.0; }

}  // namespace

Eigenvalues eigenvalues_3x3(const Matrix3& m) {
  const Cubic poly{-m.trace(), m.principal_minor_sum(), -m.determinant()};
  const double shift = poly.c2 / 3.0;

  // Depressed cubic t^3 + p t + q with lambda = t - c2/3.
  const double p = poly.c1 - poly.c2 * poly.c2 / 3.0;
  const double q = 2.0 * poly.c2 * poly.c2 * poly.c2 / 27.0 - poly.c2 * poly.c1 / 3.0 + poly.c0;
  const double disc = 0.25 * q * q + p * p * p / 27.0;

  Eigenvalues roots;
  if (disc > 0.0) {
    // One real root and a conjugate pair. Pick the cube root without cancellation.
    const double sq = std::sqrt(disc);
    const double u = std::cbrt(-0.5 * q - std::copysign(sq, q));
    const double v = (u == 0.0) ? 0.0 : -p / (3.0 * u);
    const double re = -0.5 * (u + v) - shift;
    const double im = 0.5 * std::numbers::sqrt3 * std::fabs(u - v);
    const double real_root = poly.polish(cplx(u + v - shift)).real();
    cplx upper = poly.polish(cplx(re, im));
    if (upper.imag() < 0.0) upper = std::conj(upper);
    roots = {cplx(real_root), upper, std::conj(upper)};
  } else if (p == 0.0) {
    roots.fill(cplx(-shift));
  } else {
    // Three real roots, trigonometric form.
    const double r = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * r), -1.0, 1.0);
    const double phi = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) {
      const double t = r * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0);
      roots[static_cast<std::size_t>(k)] = cplx(poly.polish(cplx(t - shift)).real());
    }
  }

  std::sort(roots.begin(), roots.end(), [](const cplx& a, const cplx& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  return roots;
}

Stability classify(const Eigenvalues& eigs) {
  int positive = 0, negative = 0;
  bool complex_pair = false;
  for (const auto& e : eigs) {
    const bool zero_real = std::fabs(e.real()) < kHyperbolicityTolerance;
    if (zero_real) {
      if (is_real(e)) return Stability::NonHyperbolic;
      // A purely imaginary pair: both members land here.
      continue;
    }
    if (!is_real(e)) complex_pair = true;
    (e.real() > 0.0 ? positive : negative)++;
  }
  if (positive + negative < 3) return Stability::Center;
  if (positive == 0) return complex_pair ? Stability::StableFocus : Stability::StableNode;
  if (negative == 0) return complex_pair ? Stability::UnstableFocus : Stability::UnstableNode;
  return complex_pair ? Stability::SaddleFocus : Stability::SaddlePoint;
}

std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::StableNode:
      return "StableNode";
    case Stability::StableFocus:
      return "StableFocus";
    case Stability::UnstableNode:
      return "UnstableNode";
    case Stability::UnstableFocus:
      return "UnstableFocus";
    case Stability::SaddlePoint:
      return "SaddlePoint";
    case Stability::SaddleFocus:
      return "SaddleFocus";
    case Stability::Center:
      return "Center";
    case Stability::NonHyperbolic:
      return "NonHyperbolic";
  }
  return "Unknown";
}

}  // namespace tdeform
