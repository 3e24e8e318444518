#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "tdeform/analysis.hpp"

namespace tdeform {

namespace {

constexpr int kMaxIterations = 100;
constexpr int kMaxHalvings = 40;
constexpr double kMergeDistance = 1e-6;

// Solves j * x = rhs by Gaussian elimination with partial pivoting.
// Empty when j is numerically singular.
std::optional<State> solve(Matrix3 j, State rhs) {
  const double scale = std::max(max_abs(j), 1e-300);
  for (std::size_t col = 0; col < 3; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < 3; ++r)
      if (std::fabs(j(r, col)) > std::fabs(j(pivot, col))) pivot = r;
    if (std::fabs(j(pivot, col)) <= 1e-14 * scale) return std::nullopt;
    if (pivot != col) {
      for (std::size_t c = 0; c < 3; ++c) std::swap(j(col, c), j(pivot, c));
      std::swap(rhs[col], rhs[pivot]);
    }
    for (std::size_t r = col + 1; r < 3; ++r) {
      const double factor = j(r, col) / j(col, col);
      for (std::size_t c = col; c < 3; ++c) j(r, c) -= factor * j(col, c);
      rhs[r] -= factor * rhs[col];
    }
  }
  State x;
  for (std::size_t i = 3; i-- > 0;) {
    double acc = rhs[i];
    for (std::size_t c = i + 1; c < 3; ++c) acc -= j(i, c) * x[c];
    x[i] = acc / j(i, i);
  }
  return x;
}

struct NewtonOutcome {
  std::optional<State> root;
  SeedFailureKind failure = SeedFailureKind::NoConvergence;
};

NewtonOutcome newton(const VectorField& f, State p, double tol) {
  State fp = f(p);
  double residual = norm(fp);
  for (int it = 0; it < kMaxIterations; ++it) {
    if (!std::isfinite(residual)) return {};
    if (residual < std::min(tol, 1e-12 * (1.0 + norm(p)))) return {p};

    const auto delta = solve(f.jacobian(p), -fp);
    if (!delta) return {std::nullopt, SeedFailureKind::SingularJacobian};

    double lambda = 1.0;
    bool improved = false;
    for (int h = 0; h <= kMaxHalvings; ++h, lambda *= 0.5) {
      const State trial = p + lambda * *delta;
      const State ft = f(trial);
      const double rt = norm(ft);
      if (std::isfinite(rt) && rt < residual) {
        p = trial;
        fp = ft;
        residual = rt;
        improved = true;
        break;
      }
    }
    if (!improved) {
      // Stalled at roundoff level.
      if (residual < tol) return {p};
      return {};
    }
  }
  if (residual < tol) return {p};
  return {};
}

}  // namespace

Equilibrium make_equilibrium(const VectorField& f, const State& point) {
  Equilibrium e;
  e.point = point;
  e.eigenvalues = eigenvalues_3x3(f.jacobian(point));
  e.classification = classify(e.eigenvalues);
  return e;
}

EquilibriumSearch find_equilibria(const VectorField& f, const std::vector<State>& seeds, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("find_equilibria requires tol > 0");
  EquilibriumSearch out;
  std::vector<State> roots;
  for (const State& seed : seeds) {
    if (!is_finite(seed)) throw std::invalid_argument("find_equilibria seeds must be finite");
    const NewtonOutcome r = newton(f, seed, tol);
    if (!r.root) {
      out.failures.push_back({seed, r.failure});
      continue;
    }
    const bool duplicate = std::any_of(roots.begin(), roots.end(), [&](const State& q) {
      return norm(q - *r.root) < kMergeDistance;
    });
    if (!duplicate) roots.push_back(*r.root);
  }
  std::sort(roots.begin(), roots.end(), [](const State& a, const State& b) {
    if (a.x != b.x) return a.x < b.x;
    if (a.y != b.y) return a.y < b.y;
    return a.z < b.z;
  });
  for (const State& p : roots) out.equilibria.push_back(make_equilibrium(f, p));
  return out;
}

std::vector<State> seed_grid(double lo, double hi, int n) {
  if (n < 1) throw std::invalid_argument("seed_grid requires n >= 1");
  std::vector<State> seeds;
  seeds.reserve(static_cast<std::size_t>(n) * n * n);
  const double step = n > 1 ? (hi - lo) / (n - 1) : 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) seeds.push_back({lo + i * step, lo + j * step, lo + k * step});
  return seeds;
}

ClosedFormEquilibria equilibria_closed_form(const DeformedParams& dp) {
  validate(dp.base);
  const double a = dp.base.a, b = dp.base.b, c = dp.base.c, g = dp.g;

  ClosedFormEquilibria out;
  out.points.push_back({0.0, 0.0, 0.0});

  const double product = b * (c - a) / a;  // x y on the off-axis branch
  if (product == 0.0) return out;          // branch collapses onto the z-axis
  const double offset = g * product / a;   // y - x
  const double z = (c - a) / a;

  // x^2 + offset x - product = 0
  const double disc = offset * offset + 4.0 * product;
  if (disc < 0.0) {
    out.complex_branch = true;
    return out;
  }
  const double sq = std::sqrt(disc);
  const double big = -0.5 * (offset + std::copysign(sq, offset == 0.0 ? 1.0 : offset));
  std::vector<double> xs{big};
  if (disc > 0.0) xs.push_back(-product / big);
  std::sort(xs.begin(), xs.end());
  for (double x : xs) out.points.push_back({x, x + offset, z});
  return out;
}

}  // namespace tdeform
