#pragma once

// Time integration of y'' + y +- |y|^{p-1} y = 0 with initial data (0, c).
//
// Two integrators are provided:
//   * an embedded Dormand-Prince 5(4) pair with PI step control and the
//     standard 4th-order continuous extension (dense output), used for
//     trajectories and for the return-map period oracle;
//   * a fixed-step Stormer-Verlet (leapfrog) scheme for long-horizon energy
//     drift comparisons.
//
// OrbitFamily caches a fixed-step Dormand-Prince solution on a grid of n
// steps per period L(e). The step size depends smoothly on e, so evaluations
// at neighbouring energies differ smoothly; adaptive step selection would
// inject tolerance-sized noise that finite-difference verifiers amplify.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "curlwave/errors.hpp"
#include "curlwave/phase_plane.hpp"

namespace curlwave {

struct IntegratorOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  double h_init = 0.0;  // 0 selects a starting step automatically
  double h_min = 1e-14;
  double h_max = 0.5;
  std::size_t max_steps = 50'000'000;
};

namespace ode {

template <std::size_t N>
using Vec = std::array<double, N>;

namespace dp5 {
// Dormand-Prince 5(4) tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// continuous extension
inline constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                        d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                        d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
}  // namespace dp5

/// One accepted step together with its dense-output polynomial.
template <std::size_t N>
struct DenseSegment {
  double t0 = 0.0;
  double h = 0.0;
  std::array<Vec<N>, 5> rc{};

  double t1() const { return t0 + h; }

  Vec<N> at(double t) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    Vec<N> out{};
    for (std::size_t i = 0; i < N; ++i) {
      out[i] = rc[0][i] + th * (rc[1][i] + th1 * (rc[2][i] + th * (rc[3][i] + th1 * rc[4][i])));
    }
    return out;
  }
};

/// Single Dormand-Prince step of size h; returns the 5th-order solution and
/// fills the stage derivatives (k[6] is f at the new point).
template <std::size_t N, class Rhs>
Vec<N> dp5_step(const Rhs& f, double t, const Vec<N>& y, double h, std::array<Vec<N>, 7>& k,
                bool have_k1 = false) {
  using namespace dp5;
  Vec<N> tmp{};
  if (!have_k1) k[0] = f(t, y);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k[0][i];
  k[1] = f(t + c2 * h, tmp);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k[0][i] + a32 * k[1][i]);
  k[2] = f(t + c3 * h, tmp);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (a41 * k[0][i] + a42 * k[1][i] + a43 * k[2][i]);
  k[3] = f(t + c4 * h, tmp);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (a51 * k[0][i] + a52 * k[1][i] + a53 * k[2][i] + a54 * k[3][i]);
  k[4] = f(t + c5 * h, tmp);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (a61 * k[0][i] + a62 * k[1][i] + a63 * k[2][i] + a64 * k[3][i] +
                         a65 * k[4][i]);
  k[5] = f(t + h, tmp);
  Vec<N> ynew{};
  for (std::size_t i = 0; i < N; ++i)
    ynew[i] = y[i] + h * (a71 * k[0][i] + a73 * k[2][i] + a74 * k[3][i] + a75 * k[4][i] +
                          a76 * k[5][i]);
  k[6] = f(t + h, ynew);
  return ynew;
}

/// Adaptive Dormand-Prince 5(4) integrator with PI step-size control.
template <std::size_t N, class Rhs>
class Dopri5 {
 public:
  Dopri5(Rhs f, double t0, const Vec<N>& y0, IntegratorOptions opts = {})
      : f_(std::move(f)), t_(t0), y_(y0), opts_(opts) {
    k_[0] = f_(t_, y_);
    h_ = opts_.h_init > 0.0 ? opts_.h_init : initial_step();
  }

  double t() const noexcept { return t_; }
  const Vec<N>& y() const noexcept { return y_; }
  std::size_t steps() const noexcept { return accepted_ + rejected_; }

  /// Advances by one accepted step, never stepping past t_limit.
  DenseSegment<N> step(double t_limit) {
    using namespace dp5;
    bool last_rejected = false;
    for (;;) {
      if (accepted_ + rejected_ >= opts_.max_steps) {
        throw NumericalError("Dopri5: maximum number of steps exceeded");
      }
      double h = std::min(h_, opts_.h_max);
      if (t_ + h >= t_limit) h = t_limit - t_;
      if (!(h >= opts_.h_min) && t_limit - t_ > opts_.h_min) {
        throw NumericalError("Dopri5: step size underflow");
      }
      std::array<Vec<N>, 7> k = k_;
      const Vec<N> ynew = dp5_step<N>(f_, t_, y_, h, k, true);

      double err = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double e = h * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] +
                              e6 * k[5][i] + e7 * k[6][i]);
        const double sc =
            opts_.abs_tol + opts_.rel_tol * std::max(std::fabs(y_[i]), std::fabs(ynew[i]));
        err += (e / sc) * (e / sc);
      }
      err = std::sqrt(err / static_cast<double>(N));

      // PI controller (Gustafsson), constants as in Hairer & Wanner's DOPRI5.
      constexpr double beta = 0.04;
      constexpr double expo = 0.2 - beta * 0.75;
      constexpr double safe = 0.9;
      const double fac11 = std::pow(std::max(err, 1e-300), expo);
      if (err <= 1.0) {
        double fac = fac11 / std::pow(err_old_, beta);
        fac = std::clamp(fac / safe, 0.1, 5.0);
        double hnew = h / fac;
        if (last_rejected) hnew = std::min(hnew, h);
        err_old_ = std::max(err, 1e-4);

        DenseSegment<N> seg;
        seg.t0 = t_;
        seg.h = h;
        for (std::size_t i = 0; i < N; ++i) {
          const double dy = ynew[i] - y_[i];
          const double bspl = h * k[0][i] - dy;
          seg.rc[0][i] = y_[i];
          seg.rc[1][i] = dy;
          seg.rc[2][i] = bspl;
          seg.rc[3][i] = dy - h * k[6][i] - bspl;
          seg.rc[4][i] = h * (d1 * k[0][i] + d3 * k[2][i] + d4 * k[3][i] + d5 * k[4][i] +
                              d6 * k[5][i] + d7 * k[6][i]);
        }
        t_ += h;
        y_ = ynew;
        k_[0] = k[6];
        h_ = hnew;
        ++accepted_;
        return seg;
      }
      h_ = h / std::min(5.0, fac11 / safe);
      last_rejected = true;
      ++rejected_;
    }
  }

 private:
  double initial_step() const {
    double dnf = 0.0;
    double dny = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sk = opts_.abs_tol + opts_.rel_tol * std::fabs(y_[i]);
      dnf += (k_[0][i] / sk) * (k_[0][i] / sk);
      dny += (y_[i] / sk) * (y_[i] / sk);
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
    return std::clamp(h, 1e-10, opts_.h_max);
  }

  Rhs f_;
  double t_;
  Vec<N> y_;
  IntegratorOptions opts_;
  std::array<Vec<N>, 7> k_{};
  double h_ = 0.0;
  double err_old_ = 1e-4;
  std::size_t accepted_ = 0;
  std::size_t rejected_ = 0;
};

/// Piecewise dense output over [t_begin, t_end].
template <std::size_t N>
class DenseSolution {
 public:
  void push(const DenseSegment<N>& s) { segs_.push_back(s); }
  bool empty() const noexcept { return segs_.empty(); }
  double t_begin() const { return segs_.front().t0; }
  double t_end() const { return segs_.back().t1(); }
  const std::vector<DenseSegment<N>>& segments() const noexcept { return segs_; }

  Vec<N> at(double t) const {
    if (segs_.empty()) throw DomainError("empty dense solution");
    if (t < t_begin() || t > t_end()) throw DomainError("time outside integrated interval");
    auto it = std::upper_bound(segs_.begin(), segs_.end(), t,
                               [](double v, const DenseSegment<N>& s) { return v < s.t1(); });
    if (it == segs_.end()) --it;
    return it->at(t);
  }

 private:
  std::vector<DenseSegment<N>> segs_;
};

}  // namespace ode

namespace oscillator {

/// Phase-space point of the model oscillator at time t.
struct OscillatorState {
  double y = 0.0;
  double ydot = 0.0;
  double t = 0.0;
};

/// Right-hand side (y, y') -> (y', -y -+ |y|^{p-1} y).
struct ModelRhs {
  Sign sign;
  double p;
  ode::Vec<2> operator()(double, const ode::Vec<2>& s) const {
    return {s[1], -s[0] - sign_factor(sign) * signed_power(s[0], p)};
  }
};

inline void check_amplitude_parameter(Sign sign, Exponent p, double c) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("initial velocity c must be >= 0");
  if (sign == Sign::Minus && !(c * c < phase_plane::separatrix_energy(p))) {
    throw DomainError("Minus initial energy c^2 must lie below the separatrix energy");
  }
}

/// Dense trajectory of the orbit through (0, c).
class Trajectory {
 public:
  Trajectory(Sign sign, Exponent p, double c, ode::DenseSolution<2> sol)
      : sign_(sign), p_(p), c_(c), sol_(std::move(sol)) {}

  Sign sign() const noexcept { return sign_; }
  Exponent exponent() const noexcept { return p_; }
  double c() const noexcept { return c_; }
  double t_end() const { return sol_.empty() ? 0.0 : sol_.t_end(); }
  const ode::DenseSolution<2>& solution() const noexcept { return sol_; }

  OscillatorState at(double t) const {
    if (sol_.empty()) {
      if (t != 0.0) throw DomainError("time outside integrated interval");
      return {0.0, c_, 0.0};
    }
    const auto s = sol_.at(t);
    return {s[0], s[1], t};
  }

  double energy(double t) const {
    const auto s = at(t);
    return phase_plane::first_integral(sign_, p_, s.y, s.ydot);
  }

  /// Largest |A(y, y') - c^2| over the step endpoints and `per_step` interior
  /// dense-output samples of every step.
  double max_energy_drift(int per_step = 3) const {
    double worst = 0.0;
    const double e0 = c_ * c_;
    for (const auto& seg : sol_.segments()) {
      for (int j = 0; j <= per_step; ++j) {
        const double t = seg.t0 + seg.h * static_cast<double>(j) / (per_step + 1);
        const auto s = seg.at(t);
        worst = std::max(worst, std::fabs(phase_plane::first_integral(sign_, p_, s[0], s[1]) - e0));
      }
    }
    return worst;
  }

 private:
  Sign sign_;
  Exponent p_;
  double c_;
  ode::DenseSolution<2> sol_;
};

/// Integrates from (y, y')(0) = (0, c) up to t_end with the adaptive 5(4) pair.
inline Trajectory integrate(Sign sign, Exponent p, double c, double t_end,
                            const IntegratorOptions& opts = {}) {
  check_amplitude_parameter(sign, p, c);
  if (!(t_end >= 0.0)) throw DomainError("t_end must be >= 0");
  ode::DenseSolution<2> sol;
  if (t_end > 0.0) {
    ode::Dopri5<2, ModelRhs> solver(ModelRhs{sign, p}, 0.0, {0.0, c}, opts);
    while (solver.t() < t_end) sol.push(solver.step(t_end));
  }
  return Trajectory(sign, p, c, std::move(sol));
}

/// First return time to the half-line {y = 0, y' > 0}, located by bisection
/// on the dense output. Independent of the quadrature period.
inline double return_map_period(Sign sign, Exponent p, double e, const IntegratorOptions& opts = {}) {
  phase_plane::check_energy(sign, p, e);
  const double c = std::sqrt(e);
  if (c == 0.0) return kTwoPi;  // linearisation at the equilibrium
  ode::Dopri5<2, ModelRhs> solver(ModelRhs{sign, p}, 0.0, {0.0, c}, opts);
  constexpr double t_guard = 1e7;
  bool went_negative = false;
  while (solver.t() < t_guard) {
    const auto seg = solver.step(t_guard);
    const double y0 = seg.rc[0][0];
    const double y1 = solver.y()[0];
    if (y0 < 0.0) went_negative = true;
    if (went_negative && y0 < 0.0 && y1 >= 0.0) {
      double a = seg.t0;
      double b = seg.t1();
      for (int it = 0; it < 200 && b - a > 4.0 * std::numeric_limits<double>::epsilon() * b; ++it) {
        const double m = 0.5 * (a + b);
        if (seg.at(m)[0] < 0.0) a = m; else b = m;
      }
      return 0.5 * (a + b);
    }
  }
  throw NumericalError("return map: no return within the time guard");
}

/// Fixed-step Stormer-Verlet samples at t = 0, h, 2h, ..., reaching t_end.
inline std::vector<OscillatorState> leapfrog(Sign sign, Exponent p, double c, double t_end, double h) {
  check_amplitude_parameter(sign, p, c);
  if (!(h > 0.0)) throw DomainError("leapfrog step must be > 0");
  const ModelRhs f{sign, p};
  const auto n = static_cast<std::size_t>(std::ceil(t_end / h - 1e-12));
  std::vector<OscillatorState> out;
  out.reserve(n + 1);
  double y = 0.0;
  double v = c;
  out.push_back({y, v, 0.0});
  for (std::size_t i = 1; i <= n; ++i) {
    const double vh = v + 0.5 * h * f(0.0, {y, v})[1];
    y += h * vh;
    v = vh + 0.5 * h * f(0.0, {y, vh})[1];
    out.push_back({y, v, static_cast<double>(i) * h});
  }
  return out;
}

/// Grid density and window of an OrbitFamily cache.
struct OrbitCacheOptions {
  int steps_per_period = 2048;
  int window_periods = 4;
};

/// y(t; c) for the orbit through (0, c), cached on a fixed grid of
/// `steps_per_period` Dormand-Prince steps per quadrature period L(c^2).
///
/// Negative times use the odd symmetry y(-t) = -y(t), y'(-t) = y'(t). Times
/// beyond `window_periods` periods are reduced modulo L(c^2).
class OrbitFamily {
 public:
  using Options = OrbitCacheOptions;

  /// `period` must be the quadrature period L(c^2) of the orbit.
  OrbitFamily(Sign sign, Exponent p, double c, double period, Options opts)
      : sign_(sign), p_(p), c_(c), period_(period), opts_(opts) {
    check_amplitude_parameter(sign, p, c);
    if (!(period > 0.0) || !std::isfinite(period)) throw DomainError("orbit period must be > 0");
    h_ = period_ / opts_.steps_per_period;
    nodes_.push_back({0.0, c_});
  }

  OrbitFamily(Sign sign, Exponent p, double c, double period)
      : OrbitFamily(sign, p, c, period, Options{}) {}

  /// Builds the family member with its quadrature period.
  static OrbitFamily from_energy(Sign sign, Exponent p, double c, const QuadratureOptions& q = {},
                                 Options opts = {}) {
    check_amplitude_parameter(sign, p, c);
    return OrbitFamily(sign, p, c, phase_plane::period(sign, p, c * c, q), opts);
  }

  double c() const noexcept { return c_; }
  double period() const noexcept { return period_; }

  /// (y, y') at time t.
  std::pair<double, double> operator()(double t) {
    if (c_ == 0.0) return {0.0, 0.0};
    if (!std::isfinite(t)) throw DomainError("time must be finite");
    const bool neg = t < 0.0;
    double s = std::fabs(t);
    const double window = opts_.window_periods * period_;
    if (s > window) s = std::fmod(s, period_);
    auto k = static_cast<std::size_t>(s / h_);
    const double dt = s - static_cast<double>(k) * h_;
    extend_to(k);
    const ModelRhs f{sign_, p_};
    ode::Vec<2> st = nodes_[k];
    if (dt > 0.0) {
      std::array<ode::Vec<2>, 7> kk;
      st = ode::dp5_step<2>(f, 0.0, st, dt, kk);
    }
    return neg ? std::pair{-st[0], st[1]} : std::pair{st[0], st[1]};
  }

 private:
  void extend_to(std::size_t k) {
    const ModelRhs f{sign_, p_};
    std::array<ode::Vec<2>, 7> kk;
    while (nodes_.size() <= k) {
      nodes_.push_back(ode::dp5_step<2>(f, 0.0, nodes_.back(), h_, kk));
    }
  }

  Sign sign_;
  Exponent p_;
  double c_;
  double period_;
  Options opts_;
  double h_;
  std::vector<ode::Vec<2>> nodes_;
};

/// (y, y')(t; c), building a fresh orbit cache.
inline std::pair<double, double> family_eval(Sign sign, Exponent p, double c, double t,
                                             const QuadratureOptions& q = {}) {
  check_amplitude_parameter(sign, p, c);
  if (c == 0.0) return {0.0, 0.0};
  auto orbit = OrbitFamily::from_energy(sign, p, c, q);
  return orbit(t);
}

}  // namespace oscillator
}  // namespace curlwave
