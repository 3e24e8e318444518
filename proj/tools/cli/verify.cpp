#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include <fmt/format.h>

#include "tdeform/analysis.hpp"
#include "tdeform/deformation.hpp"
#include "tdeform/errors.hpp"
#include "tdeform/integrator.hpp"

namespace tdeform::cli {

namespace {

std::vector<State> sample_cube(std::mt19937_64& rng, int n, double radius) {
  std::uniform_real_distribution<double> u(-radius, radius);
  std::vector<State> pts(static_cast<std::size_t>(n));
  for (auto& p : pts) p = {u(rng), u(rng), u(rng)};
  return pts;
}

// Largest |grad I . v| over the points, for each invariant.
double conservation_residual(const VectorField& f, const std::vector<ScalarField>& invariants,
                             const std::vector<State>& pts) {
  double worst = 0.0;
  for (const auto& s : pts) {
    const State v = f(s);
    for (const auto& inv : invariants) worst = std::max(worst, std::fabs(dot(inv.gradient(s), v)));
  }
  return worst;
}

Matrix3 finite_difference_jacobian(const VectorField& f, const State& s) {
  return tdeform::finite_difference_jacobian([&](const State& q) { return f(q); }, s);
}

double field_difference(const VectorField& f, const VectorField& g, const std::vector<State>& pts) {
  double worst = 0.0;
  for (const auto& s : pts) worst = std::max(worst, max_abs(f(s) - g(s)));
  return worst;
}

// alpha, beta in (y, z) only with a small beta keep C + beta coercive for
// a > 0, so deformed orbits stay bounded and the drift is meaningful.
DeformationSpec bounded_spec(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  QuadraticPolynomial alpha, beta;
  alpha.linear = {0.0, 0.3 * u(rng), 0.3 * u(rng)};
  alpha.quadratic = {0.0, 0.0, 0.0, 0.2 * u(rng), 0.2 * u(rng), 0.2 * u(rng)};
  beta.linear = {0.0, 0.2 * u(rng), 0.2 * u(rng)};
  beta.quadratic = {0.0, 0.0, 0.0, 0.05 + 0.05 * u(rng), 0.05 * u(rng), 0.05 + 0.05 * u(rng)};
  return {alpha.to_field(), beta.to_field()};
}

class Suite {
 public:
  explicit Suite(VerifyReport& report) : report_(report) {}

  void check(std::string name, double threshold, const std::function<double()>& body) {
    CheckResult r{std::move(name), 0.0, threshold, false, false};
    try {
      r.residual = body();
      r.passed = std::isfinite(r.residual) && r.residual < threshold;
    } catch (const NumericalError& e) {
      r.residual = std::numeric_limits<double>::infinity();
      report_.warnings.push_back(fmt::format("{}: numerical failure ({})", r.name, to_string(e.kind())));
    }
    report_.checks.push_back(std::move(r));
  }

  void skip(std::string name, double threshold) {
    report_.checks.push_back({std::move(name), 0.0, threshold, true, true});
  }

 private:
  VerifyReport& report_;
};

}  // namespace

bool VerifyReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

VerifyReport run_identity_suite(const VerifyOptions& opt) {
  const TParams& p = opt.params;
  validate(p);
  if (opt.samples < 1) throw std::invalid_argument("samples must be >= 1");

  VerifyReport report;
  const double abs_a = std::fabs(p.a);
  if (abs_a < 1e-8)
    report.warnings.push_back(fmt::format(
        "a = {:g} is nearly zero: C = y^2/2 + a z^2/2 loses its z dependence, the nonzero equilibria "
        "move off to infinity and the gradient rank test is ill-conditioned",
        p.a));
  if (abs_a > 1e6 || std::fabs(p.c) > 1e6)
    report.warnings.push_back("large parameters: absolute thresholds below are dominated by roundoff");
  if (p.a < 0)
    report.warnings.push_back("a < 0 makes C indefinite; integration checks are skipped");

  // Absolute roundoff in the cancelling a*x*y*z terms grows with a.
  const double scale = std::max(1.0, abs_a / 2.0);
  const auto [h, c] = hp_constants(p);
  const auto mu = ScalarField::coordinate(0);
  VectorField hp = hp_field(p);
  if (opt.corrupt) {
    const VectorField clean = hp;
    hp = VectorField([clean](const State& s) { return clean(s) + State{1e-6 * s.x, 0.0, 0.0}; });
  }
  const auto f = t_field(p);
  const auto n = opt.samples;

  std::mt19937_64 rng(opt.seed);
  Suite suite(report);

  suite.check("hamilton-poisson conservation (pointwise)", 1e-12 * scale, [&] {
    const auto pts = sample_cube(rng, n, 10.0);
    double worst = conservation_residual(hp, {h, c}, pts);
    for (const auto& part : alternate_hp_parts(p))
      worst = std::max(worst, conservation_residual(part.field, {part.hamiltonian, part.casimir}, pts));
    return worst;
  });

  suite.check("cross-form equality", 1e-12 * scale,
              [&] { return field_difference(hp, cross_form(mu, h, c), sample_cube(rng, n, 10.0)); });

  suite.check("gradient rank 2 off the x axis", 0.5, [&] {
    // Residual is the fraction of sampled points where rank drops.
    int dropped = 0;
    for (const auto& s : sample_cube(rng, n, 10.0))
      if (s.y * s.y + s.z * s.z > 1e-6 && !functionally_independent_at(h, c, s)) ++dropped;
    return static_cast<double>(dropped) / n;
  });

  suite.check("deformation: closed form vs generic construction", 1e-10 * scale, [&] {
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
      const auto spec = random_quadratic_spec(rng);
      worst = std::max(worst, field_difference(deform_t(p, spec), deform_generic(f, mu, h, c, spec),
                                               sample_cube(rng, n, 5.0)));
    }
    return worst;
  });

  suite.check("reduction at g = 0", 1e-14, [&] {
    const auto pts = sample_cube(rng, n, 5.0);
    return std::max(field_difference(deform_t(p, DeformationSpec{}), f, pts),
                    field_difference(particular_field({p, 0.0}), f, pts));
  });

  suite.check("deformed conservation (pointwise)", 1e-10 * scale, [&] {
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
      const auto spec = random_quadratic_spec(rng);
      const auto deformed = deform_generic(hp, mu, h, c, spec);
      worst = std::max(worst, conservation_residual(deformed, {h + spec.alpha, c + spec.beta},
                                                    sample_cube(rng, std::max(1, n / 4), 5.0)));
    }
    return worst;
  });

  suite.check("analytic Jacobians vs central differences", 1e-6 * (1.0 + abs_a + std::fabs(p.b) + std::fabs(p.c)),
              [&] {
                double worst = 0.0;
                for (const auto& field : {f, particular_field({p, 0.9})})
                  for (const auto& s : sample_cube(rng, n, 10.0))
                    worst = std::max(worst, max_abs(field.jacobian(s) - finite_difference_jacobian(field, s)));
                return worst;
              });

  if (p.a > 0) {
    suite.check("hamilton-poisson drift over [0, 100]", 1e-8, [&] {
      const auto traj = integrate(hp, {1.0, 2.0, 2.0}, IntegrationConfig::high_accuracy(0.0, 100.0, 1e-10));
      const auto d = conservation_drift({h, c}, traj);
      return std::max(d[0], d[1]);
    });
    suite.check("deformed drift over [0, 10]", 1e-8, [&] {
      double worst = 0.0;
      for (int k = 0; k < 3; ++k) {
        const auto spec = bounded_spec(rng);
        const auto deformed = deform_generic(hp, mu, h, c, spec);
        const auto traj = integrate(deformed, {0.7, -0.4, 0.5}, IntegrationConfig::high_accuracy(0.0, 10.0, 1e-12));
        const auto d = conservation_drift({h + spec.alpha, c + spec.beta}, traj);
        worst = std::max({worst, d[0], d[1]});
      }
      return worst;
    });
  } else {
    suite.skip("hamilton-poisson drift over [0, 100]", 1e-8);
    suite.skip("deformed drift over [0, 10]", 1e-8);
  }
  return report;
}

}  // namespace tdeform::cli
