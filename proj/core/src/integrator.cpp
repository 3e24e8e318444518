#include "tdeform/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "tdeform/errors.hpp"

namespace tdeform {

namespace {

constexpr double kMinStep = 1e-12;

// Dormand-Prince 5(4) tableau. The fields are autonomous, so the nodes c_i are unused.
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

// PI step-size controller; the integral exponent alpha depends on the pair's order.
constexpr double kSafety = 0.9;
constexpr double kMinGrowth = 0.2;
constexpr double kMaxGrowth = 5.0;
constexpr double kPiBeta = 0.04;

[[noreturn]] void throw_overflow(double t) {
  std::ostringstream msg;
  msg << "state became non-finite near t = " << t;
  throw NumericalError(NumericalFailure::Overflow, msg.str());
}

State checked(const State& s, double t) {
  if (!is_finite(s)) throw_overflow(t);
  return s;
}

class Recorder {
 public:
  Recorder(Trajectory& out, double t0, double stride) : out_(out), t0_(t0), stride_(stride) {}

  void push(double t, const State& s) {
    if (!out_.times.empty() && !(t > out_.times.back())) return;
    out_.times.push_back(t);
    out_.states.push_back(s);
  }

  double stride() const { return stride_; }
  double next_sample() const { return t0_ + static_cast<double>(k_) * stride_; }
  void advance_past(double t, double slack) {
    while (next_sample() <= t + slack) ++k_;
  }

 private:
  Trajectory& out_;
  double t0_;
  double stride_;
  long long k_ = 1;
};

Trajectory integrate_fixed(const VectorField& f, const State& s0, const IntegrationConfig& cfg) {
  Trajectory traj;
  Recorder rec(traj, cfg.t0, cfg.sample_every);
  rec.push(cfg.t0, s0);

  const double span = cfg.t_end - cfg.t0;
  const auto n_steps = static_cast<long long>(std::ceil(span / cfg.dt - 1e-9));
  const double slack = 1e-9 * cfg.dt;
  State s = s0;
  for (long long i = 0; i < n_steps; ++i) {
    const double t = cfg.t0 + static_cast<double>(i) * cfg.dt;
    const bool last = (i + 1 == n_steps);
    const double t_next = last ? cfg.t_end : cfg.t0 + static_cast<double>(i + 1) * cfg.dt;
    s = rk4_step(f, s, t, t_next - t);
    if (rec.stride() <= 0.0) {
      rec.push(t_next, s);
    } else if (t_next + slack >= rec.next_sample()) {
      rec.push(t_next, s);
      rec.advance_past(t_next, slack);
    }
  }
  rec.push(cfg.t_end, s);
  return traj;
}

double weight(const State& y0, const State& y1, std::size_t i, double atol, double rtol) {
  return atol + rtol * std::fmax(std::fabs(y0[i]), std::fabs(y1[i]));
}

// Weighted RMS over the three components.
double error_norm(const State& err, const State& y0, const State& y1, double atol, double rtol) {
  double acc = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double r = err[i] / weight(y0, y1, i, atol, rtol);
    acc += r * r;
  }
  return std::sqrt(acc / 3.0);
}

struct TrialStep {
  State y_new;
  State f_new;  // f(y_new), reused as the next first stage
  double err;
};

TrialStep dopri54_step(const VectorField& f, const State& y, const State& k1, double h, double t,
                       const IntegrationConfig& cfg) {
  const State k2 = checked(f(y + h * a21 * k1), t);
  const State k3 = checked(f(y + h * (a31 * k1 + a32 * k2)), t);
  const State k4 = checked(f(y + h * (a41 * k1 + a42 * k2 + a43 * k3)), t);
  const State k5 = checked(f(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)), t);
  const State k6 = checked(f(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)), t);
  const State y_new = checked(y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6), t);
  const State k7 = checked(f(y_new), t);
  const State err_vec = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
  return {y_new, k7, error_norm(err_vec, y, y_new, cfg.abs_tol, cfg.rel_tol)};
}

// Dormand-Prince 8(5,3) tableau (12 stages, autonomous form).
constexpr std::array<std::array<double, 11>, 12> kA853{{
    {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.05260015195876773, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.0197250569845379, 0.0591751709536137, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.02958758547680685, 0.0, 0.08876275643042054, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.2413651341592667, 0.0, -0.8845494793282861, 0.924834003261792, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.037037037037037035, 0.0, 0.0, 0.17082860872947386, 0.12546768756682242, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.037109375, 0.0, 0.0, 0.17025221101954405, 0.06021653898045596, -0.017578125, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.03709200011850479, 0.0, 0.0, 0.17038392571223998, 0.10726203044637328, -0.015319437748624402, 0.008273789163814023, 0.0, 0.0, 0.0, 0.0},
    {0.6241109587160757, 0.0, 0.0, -3.3608926294469414, -0.868219346841726, 27.59209969944671, 20.154067550477894, -43.48988418106996, 0.0, 0.0, 0.0},
    {0.47766253643826434, 0.0, 0.0, -2.4881146199716677, -0.590290826836843, 21.230051448181193, 15.279233632882423, -33.28821096898486, -0.020331201708508627, 0.0, 0.0},
    {-0.9371424300859873, 0.0, 0.0, 5.186372428844064, 1.0914373489967295, -8.149787010746927, -18.52006565999696, 22.739487099350505, 2.4936055526796523, -3.0467644718982196, 0.0},
    {2.273310147516538, 0.0, 0.0, -10.53449546673725, -2.0008720582248625, -17.9589318631188, 27.94888452941996, -2.8589982771350235, -8.87285693353063, 12.360567175794303, 0.6433927460157636},
}};
constexpr std::array<double, 12> kB853{0.054293734116568765, 0.0, 0.0, 0.0, 0.0, 4.450312892752409, 1.8915178993145003, -5.801203960010585, 0.3111643669578199, -0.1521609496625161, 0.20136540080403034, 0.04471061572777259};
constexpr std::array<double, 12> kE3_853{-0.18980075407240762, 0.0, 0.0, 0.0, 0.0, 4.450312892752409, 1.8915178993145003, -5.801203960010585, -0.4226823213237919, -0.1521609496625161, 0.20136540080403034, 0.02265179219836082};
constexpr std::array<double, 12> kE5_853{0.01312004499419488, 0.0, 0.0, 0.0, 0.0, -1.2251564463762044, -0.4957589496572502, 1.6643771824549864, -0.35032884874997366, 0.3341791187130175, 0.08192320648511571, -0.022355307863886294};

TrialStep dop853_step(const VectorField& f, const State& y, const State& k1, double h, double t,
                      const IntegrationConfig& cfg) {
  std::array<State, 12> k;
  k[0] = k1;
  for (std::size_t i = 1; i < 12; ++i) {
    State acc;
    for (std::size_t j = 0; j < i; ++j) acc += kA853[i][j] * k[j];
    k[i] = checked(f(y + h * acc), t);
  }
  State incr, err5, err3;
  for (std::size_t i = 0; i < 12; ++i) {
    incr += kB853[i] * k[i];
    err5 += kE5_853[i] * k[i];
    err3 += kE3_853[i] * k[i];
  }
  const State y_new = checked(y + h * incr, t);

  // Blend of the fifth- and third-order estimates, as in Hairer's DOP853.
  double n5 = 0.0, n3 = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double w = weight(y, y_new, i, cfg.abs_tol, cfg.rel_tol);
    n5 += (err5[i] / w) * (err5[i] / w);
    n3 += (err3[i] / w) * (err3[i] / w);
  }
  double err = 0.0;
  if (n5 > 0.0 || n3 > 0.0) err = std::fabs(h) * n5 / std::sqrt((n5 + 0.01 * n3) * 3.0);
  return {y_new, checked(f(y_new), t), err};
}

template <class Stepper>
Trajectory integrate_adaptive(const VectorField& f, const State& s0, const IntegrationConfig& cfg,
                              Stepper&& stepper, double alpha) {
  Trajectory traj;
  Recorder rec(traj, cfg.t0, cfg.sample_every);
  rec.push(cfg.t0, s0);

  double t = cfg.t0;
  State y = s0;
  State k1 = checked(f(y), t);
  double h = std::min(cfg.dt_initial, cfg.dt_max);
  double err_prev = 1e-4;
  bool last_rejected = false;

  while (t < cfg.t_end) {
    const double target = rec.stride() > 0.0 ? std::min(cfg.t_end, rec.next_sample()) : cfg.t_end;
    const bool clipped = h >= target - t;
    const double step = clipped ? target - t : h;

    const TrialStep trial = stepper(f, y, k1, step, t, cfg);
    if (!std::isfinite(trial.err)) throw_overflow(t);

    if (trial.err <= 1.0) {
      t = clipped ? target : t + step;
      y = trial.y_new;
      k1 = trial.f_new;

      double growth = trial.err == 0.0
                          ? kMaxGrowth
                          : kSafety * std::pow(trial.err, -alpha) * std::pow(err_prev, kPiBeta);
      growth = std::clamp(growth, kMinGrowth, last_rejected ? 1.0 : kMaxGrowth);
      err_prev = std::max(trial.err, 1e-4);
      last_rejected = false;
      h = std::min(std::max(h, step) * growth, cfg.dt_max);

      if (rec.stride() <= 0.0) {
        rec.push(t, y);
      } else if (clipped && target < cfg.t_end) {
        rec.push(t, y);
        rec.advance_past(t, 0.0);
      }
    } else {
      const double shrink = std::max(kMinGrowth, kSafety * std::pow(trial.err, -alpha));
      h = step * shrink;
      last_rejected = true;
      if (h < kMinStep) {
        std::ostringstream msg;
        msg << "step size " << h << " below " << kMinStep << " at t = " << t;
        throw NumericalError(NumericalFailure::StepUnderflow, msg.str());
      }
    }
  }
  rec.push(cfg.t_end, y);
  return traj;
}

}  // namespace

IntegrationConfig IntegrationConfig::fixed(double t0, double t_end, double dt, double sample_every) {
  IntegrationConfig cfg;
  cfg.t0 = t0;
  cfg.t_end = t_end;
  cfg.method = StepMethod::FixedRk4;
  cfg.dt = dt;
  cfg.sample_every = sample_every;
  return cfg;
}

IntegrationConfig IntegrationConfig::adaptive(double t0, double t_end, double abs_tol, double rel_tol,
                                              double sample_every, StepMethod method) {
  if (method == StepMethod::FixedRk4) throw std::invalid_argument("adaptive() needs an embedded pair");
  IntegrationConfig cfg;
  cfg.t0 = t0;
  cfg.t_end = t_end;
  cfg.method = method;
  cfg.abs_tol = abs_tol;
  cfg.rel_tol = rel_tol;
  cfg.sample_every = sample_every;
  cfg.dt_max = std::max(1e-12, (t_end - t0) / 10.0);
  cfg.dt_initial = std::min(1e-3, cfg.dt_max);
  return cfg;
}

IntegrationConfig IntegrationConfig::high_accuracy(double t0, double t_end, double tol,
                                                   double sample_every) {
  return adaptive(t0, t_end, tol, tol, sample_every, StepMethod::DormandPrince853);
}

void IntegrationConfig::validate() const {
  if (!std::isfinite(t0) || !std::isfinite(t_end) || !(t_end > t0))
    throw std::invalid_argument("integration requires finite t0 < t_end");
  if (!(sample_every >= 0.0) || !std::isfinite(sample_every))
    throw std::invalid_argument("sample_every must be >= 0");
  if (method == StepMethod::FixedRk4) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be > 0");
  } else {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
      throw std::invalid_argument("tolerances must be > 0");
    if (!(dt_initial > 0.0) || !(dt_max > 0.0))
      throw std::invalid_argument("dt_initial and dt_max must be > 0");
  }
}

State rk4_step(const VectorField& f, const State& s, double t, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("rk4_step requires h > 0");
  const State k1 = checked(f(s), t);
  const State k2 = checked(f(s + (0.5 * h) * k1), t);
  const State k3 = checked(f(s + (0.5 * h) * k2), t);
  const State k4 = checked(f(s + h * k3), t);
  return checked(s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), t + h);
}

Trajectory integrate(const VectorField& f, const State& s0, const IntegrationConfig& cfg) {
  cfg.validate();
  if (!is_finite(s0)) throw std::invalid_argument("initial state must be finite");
  switch (cfg.method) {
    case StepMethod::FixedRk4:
      return integrate_fixed(f, s0, cfg);
    case StepMethod::DormandPrince54:
      return integrate_adaptive(f, s0, cfg, dopri54_step, 0.2 - 0.75 * kPiBeta);
    case StepMethod::DormandPrince853:
      return integrate_adaptive(f, s0, cfg, dop853_step, 0.125 - 0.2 * kPiBeta);
  }
  throw std::invalid_argument("unknown step method");
}

}  // namespace tdeform
