#pragma once

// First integrals, amplitude and period functions of the model oscillators
//
//     y'' + y + |y|^{p-1} y = 0   (Sign::Plus)
//     y'' + y - |y|^{p-1} y = 0   (Sign::Minus)
//
// and the inverse period map M = L^{-1}.
//
// Periodic orbits are labelled by their energy e = A(y, y'). The period is
// evaluated as L(e) = F(w(e)) with w = 2/(p+1) N(e)^{p-1}, where
//
//     F(w) = 4 \int_0^{pi/2} (1 +- w kappa(cos u))^{-1/2} du
//
// is the z = sin(theta) form of the period integral, so the endpoint
// singularity 1/sqrt(1-z^2) never appears. Near s = 2 pi the inversion works
// with the period defect D(w) = |F(w) - 2 pi|, which is evaluated directly
// (not as a difference of two numbers close to 2 pi) and therefore keeps full
// relative accuracy for arbitrarily small orbits.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "curlwave/errors.hpp"

namespace curlwave {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class Sign { Plus, Minus };

constexpr double sign_factor(Sign s) { return s == Sign::Plus ? 1.0 : -1.0; }

inline std::string to_string(Sign s) { return s == Sign::Plus ? "plus" : "minus"; }

inline Sign parse_sign(const std::string& text) {
  if (text == "plus" || text == "+") return Sign::Plus;
  if (text == "minus" || text == "-") return Sign::Minus;
  throw ConfigError("sign must be \"plus\" or \"minus\", got \"" + text + "\"");
}

/// Nonlinearity exponent p, always > 1.
class Exponent {
 public:
  explicit Exponent(double p) : p_(p) {
    if (!(p > 1.0) || !std::isfinite(p)) {
      throw DomainError("exponent p must satisfy p > 1, got " + std::to_string(p));
    }
  }
  double value() const noexcept { return p_; }
  operator double() const noexcept { return p_; }  // NOLINT: read-only view

 private:
  double p_;
};

/// |x|^k, with x = 0 short-circuited so that non-integer k never sees log(0).
inline double abs_pow(double x, double k) {
  const double a = std::fabs(x);
  if (a == 0.0) return 0.0;
  return std::exp(k * std::log(a));
}

/// |y|^{p-1} y
inline double signed_power(double y, double p) {
  if (y == 0.0) return 0.0;
  const double m = abs_pow(y, p);
  return y > 0.0 ? m : -m;
}

struct QuadratureOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  unsigned max_depth = 15;
};

struct RootOptions {
  // bits of relative precision requested from the bracketing solver
  int bits = 50;
  std::uintmax_t max_iter = 200;
};

namespace phase_plane {

namespace detail {

/// kappa in terms of d = 1 - z, evaluated without cancellation near z = 1.
inline double kappa_from_gap(double d, double p) {
  if (d <= 0.0) return 0.5 * (p + 1.0);
  if (d >= 1.0) return 1.0;
  const double num = -std::expm1((p + 1.0) * std::log1p(-d));
  const double den = d * (2.0 - d);
  return num / den;
}

/// kappa(z) at z = cos(u); 1 - cos u = 2 sin^2(u/2) is exact for small u.
inline double kappa_at_angle(double u, double p) {
  const double h = std::sin(0.5 * u);
  return kappa_from_gap(2.0 * h * h, p);
}

template <class F>
double integrate(F&& f, double a, double b, const QuadratureOptions& q, const char* what) {
  double err = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      std::forward<F>(f), a, b, q.max_depth, q.rel_tol, &err, &l1);
  if (!std::isfinite(value)) {
    throw NumericalError(std::string("non-finite quadrature result in ") + what);
  }
  const double budget = std::max(q.abs_tol, 10.0 * q.rel_tol * std::max(std::fabs(value), l1));
  if (err > budget) {
    throw NumericalError(std::string("quadrature did not converge in ") + what);
  }
  return value;
}

/// Integral over u in [0, pi/2] of an integrand built on 1 +- w kappa(cos u).
/// Near the Minus cap 1 - w kappa has a minimum of width sqrt(gap) at u = 0,
/// so the range is split geometrically from that width outwards.
template <class F>
double integrate_angle(F&& f, Sign sign, double p, double w, const QuadratureOptions& q,
                       const char* what) {
  constexpr double kHalfPi = 0.5 * std::numbers::pi;
  double width = kHalfPi;
  QuadratureOptions qq = q;
  if (sign == Sign::Minus) {
    const double gap = std::max(1.0 - 0.5 * (p + 1.0) * w, 0.0);
    width = std::sqrt(gap);
    // 1 - w kappa carries a rounding error ~ eps / gap relative to itself;
    // asking for more than that only makes the estimator chase noise
    qq.rel_tol = std::max(q.rel_tol, 64.0 * std::numeric_limits<double>::epsilon() / gap);
  }
  if (width >= 0.1) return integrate(f, 0.0, kHalfPi, qq, what);
  double total = 0.0;
  double a = 0.0;
  for (double b = width; a < kHalfPi; b *= 4.0) {
    const double hi = std::min(b, kHalfPi);
    total += integrate(f, a, hi, qq, what);
    a = hi;
  }
  return total;
}

inline void check_w(Sign sign, double p, double w) {
  if (!(w >= 0.0)) throw DomainError("period parameter w must be >= 0");
  if (sign == Sign::Minus && !(w < 2.0 / (p + 1.0))) {
    throw DomainError("Minus period parameter w must be < 2/(p+1)");
  }
}

/// 1 +- w kappa, rejecting non-positive values that rounding can produce
/// right at the Minus cap.
inline double shifted(Sign sign, double w, double kap) {
  const double v = 1.0 + sign_factor(sign) * w * kap;
  if (!(v > 0.0)) throw DomainError("period integrand singular: 1 - w*kappa <= 0");
  return v;
}

}  // namespace detail

/// A(xi, eta) = eta^2 + xi^2 +- 2/(p+1) |xi|^{p+1}
inline double first_integral(Sign sign, Exponent p, double xi, double eta) {
  return eta * eta + xi * xi + sign_factor(sign) * 2.0 / (p + 1.0) * abs_pow(xi, p + 1.0);
}

/// Energy of the Minus separatrix through (+-1, 0).
inline double separatrix_energy(Exponent p) { return (p - 1.0) / (p + 1.0); }

inline void check_energy(Sign sign, Exponent p, double e) {
  if (!(e >= 0.0) || !std::isfinite(e)) {
    throw DomainError("orbit energy must be finite and >= 0, got " + std::to_string(e));
  }
  if (sign == Sign::Minus && !(e < separatrix_energy(p))) {
    throw DomainError("Minus orbit energy must be below the separatrix energy (p-1)/(p+1)");
  }
}

/// kappa(z) = (1 - z^{p+1}) / (1 - z^2) on [0, 1], continuous at z = 1.
inline double kappa(double z, Exponent p) {
  if (!(z >= 0.0 && z <= 1.0)) throw DomainError("kappa requires 0 <= z <= 1");
  return detail::kappa_from_gap(1.0 - z, p);
}

/// Maximal amplitude N(e) of the orbit with energy e.
inline double amplitude(Sign sign, Exponent p, double e, const RootOptions& ro = {}) {
  check_energy(sign, p, e);
  if (e == 0.0) return 0.0;
  const double k = 2.0 / (p + 1.0);
  auto tol = boost::math::tools::eps_tolerance<double>(ro.bits);
  std::uintmax_t iters = ro.max_iter;

  if (sign == Sign::Plus) {
    auto f = [&](double n) { return n * n + k * abs_pow(n, p + 1.0) - e; };
    // N <= sqrt(e); the slack absorbs rounding of sqrt when N is tiny
    const double hi = std::sqrt(e) * (1.0 + 8.0 * std::numeric_limits<double>::epsilon());
    const double fhi = f(hi);
    if (fhi == 0.0) return hi;
    const auto [a, b] = boost::math::tools::toms748_solve(f, 0.0, hi, -e, fhi, tol, iters);
    return std::min(0.5 * (a + b), std::sqrt(e));
  }

  if (e < 0.5 * separatrix_energy(p)) {
    // away from the separatrix the direct form keeps N relatively accurate
    auto h = [&](double n) { return n * n - k * abs_pow(n, p + 1.0) - e; };
    const double h1 = separatrix_energy(p) - e;
    const auto [a, b] = boost::math::tools::toms748_solve(h, 0.0, 1.0, -e, h1, tol, iters);
    return 0.5 * (a + b);
  }

  // Minus: solve in the gap x = 1 - N, where G(x) = e* - h(1 - x) is
  // evaluated without cancellation; this keeps N accurate near the separatrix.
  const double target = separatrix_energy(p) - e;
  auto g = [&](double x) {
    const double tail = std::expm1((p + 1.0) * std::log1p(-x));
    return 2.0 * x - x * x + k * tail - target;
  };
  const double g0 = -target;
  const double g1 = e;  // G(1) = e* - h(0)
  const auto [a, b] = boost::math::tools::toms748_solve(g, 0.0, 1.0, g0, g1, tol, iters);
  return 1.0 - 0.5 * (a + b);
}

/// w(e) = 2/(p+1) N(e)^{p-1}, the argument of F.
inline double period_parameter(Sign sign, Exponent p, double e, const RootOptions& ro = {}) {
  return 2.0 / (p + 1.0) * abs_pow(amplitude(sign, p, e, ro), p - 1.0);
}

/// Phi(w): the energy of the orbit whose period parameter is w.
inline double phi_map(Exponent p, double w, Sign sign) {
  detail::check_w(sign, p, w);
  if (w == 0.0) return 0.0;
  const double scale = std::pow(0.5 * (p + 1.0), 2.0 / (p - 1.0));
  const double lo = abs_pow(w, 2.0 / (p - 1.0));
  return scale * lo * (1.0 + sign_factor(sign) * w);
}

/// F(w).
inline double F(Sign sign, Exponent p, double w, const QuadratureOptions& q = {}) {
  detail::check_w(sign, p, w);
  if (w == 0.0) return kTwoPi;
  auto f = [&](double u) {
    return 1.0 / std::sqrt(detail::shifted(sign, w, detail::kappa_at_angle(u, p)));
  };
  return 4.0 * detail::integrate_angle(f, sign, p, w, q, "F");
}

/// F'(w); negative for Plus, positive for Minus.
inline double F_prime(Sign sign, Exponent p, double w, const QuadratureOptions& q = {}) {
  detail::check_w(sign, p, w);
  auto f = [&](double u) {
    const double kap = detail::kappa_at_angle(u, p);
    const double v = detail::shifted(sign, w, kap);
    return kap / (v * std::sqrt(v));
  };
  return -sign_factor(sign) * 2.0 * detail::integrate_angle(f, sign, p, w, q, "F'");
}

/// F''(w); positive for both signs.
inline double F_second(Sign sign, Exponent p, double w, const QuadratureOptions& q = {}) {
  detail::check_w(sign, p, w);
  auto f = [&](double u) {
    const double kap = detail::kappa_at_angle(u, p);
    const double v = detail::shifted(sign, w, kap);
    return kap * kap / (v * v * std::sqrt(v));
  };
  return 3.0 * detail::integrate_angle(f, sign, p, w, q, "F''");
}

/// D(w) = |F(w) - 2 pi|, computed from the integrand difference
/// 1 - (1 +- u)^{-1/2} = +-u / (sqrt(1 +- u) (1 + sqrt(1 +- u))).
inline double period_defect(Sign sign, Exponent p, double w, const QuadratureOptions& q = {}) {
  detail::check_w(sign, p, w);
  if (w == 0.0) return 0.0;
  auto f = [&](double u) {
    const double kap = detail::kappa_at_angle(u, p);
    const double r = std::sqrt(detail::shifted(sign, w, kap));
    return kap / (r * (1.0 + r));
  };
  return 4.0 * w * detail::integrate_angle(f, sign, p, w, q, "period defect");
}

/// L(e), the minimal period of the orbit with energy e.
inline double period(Sign sign, Exponent p, double e, const QuadratureOptions& q = {},
                     const RootOptions& ro = {}) {
  return F(sign, p, period_parameter(sign, p, e, ro), q);
}

/// Largest admissible period parameter on the Minus branch: the orbit with
/// energy e* - margin.
inline double minus_parameter_cap(Exponent p, double margin, const RootOptions& ro = {}) {
  const double e_cap = separatrix_energy(p) - margin;
  return period_parameter(Sign::Minus, p, e_cap, ro);
}

/// Solves D(w) = defect for the period parameter w, starting from the
/// leading-order guess defect / |F'(0)|.
inline double invert_defect_parameter(Sign sign, Exponent p, double defect,
                                      const QuadratureOptions& q = {}, const RootOptions& ro = {},
                                      double separatrix_margin = 1e-12) {
  if (!(defect >= 0.0) || !std::isfinite(defect)) {
    throw DomainError("period defect must be finite and >= 0");
  }
  if (defect == 0.0) return 0.0;
  const double slope0 = std::fabs(F_prime(sign, p, 0.0, q));
  const double linear = defect / slope0;
  auto f = [&](double w) { return period_defect(sign, p, w, q) - defect; };

  // Start at the linear guess and walk outwards until the sign changes. The
  // guess sits on the correct side up to rounding, so the walk is short.
  double cap = std::numeric_limits<double>::infinity();
  if (sign == Sign::Minus) cap = minus_parameter_cap(p, separatrix_margin, ro);
  double x = std::min(linear, cap);
  double fx = f(x);
  if (fx == 0.0) return x;
  double lo = x;
  double hi = x;
  double flo = fx;
  double fhi = fx;
  int guard = 0;
  if (fx < 0.0) {
    while (fhi < 0.0) {
      if (hi >= cap) {
        throw RangeError("requested Minus period exceeds the separatrix cap L(e* - margin)");
      }
      lo = hi;
      flo = fhi;
      hi = std::min(2.0 * hi, cap);
      fhi = f(hi);
      if (++guard > 2000) throw NumericalError("period inversion failed to bracket");
    }
  } else {
    while (flo > 0.0) {
      hi = lo;
      fhi = flo;
      lo *= 0.5;
      flo = f(lo);
      if (++guard > 2000) throw NumericalError("period inversion failed to bracket");
    }
  }
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  std::uintmax_t iters = ro.max_iter;
  const auto [a, b] = boost::math::tools::toms748_solve(
      f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(ro.bits), iters);
  return 0.5 * (a + b);
}

/// M(2 pi -+ defect): orbit energy whose period differs from 2 pi by `defect`
/// (below 2 pi for Plus, above for Minus).
inline double invert_period_defect(Sign sign, Exponent p, double defect,
                                   const QuadratureOptions& q = {}, const RootOptions& ro = {},
                                   double separatrix_margin = 1e-12) {
  const double w = invert_defect_parameter(sign, p, defect, q, ro, separatrix_margin);
  return phi_map(p, w, sign);
}

/// M(s) = L^{-1}(s). Plus: s in (0, 2 pi]; Minus: s in [2 pi, inf).
inline double invert_period(Sign sign, Exponent p, double s, const QuadratureOptions& q = {},
                            const RootOptions& ro = {}, double separatrix_margin = 1e-12) {
  if (!std::isfinite(s)) throw DomainError("period must be finite");
  if (sign == Sign::Plus && !(s > 0.0 && s <= kTwoPi)) {
    throw DomainError("Plus periods lie in (0, 2 pi]");
  }
  if (sign == Sign::Minus && !(s >= kTwoPi)) {
    throw DomainError("Minus periods lie in [2 pi, inf)");
  }
  return invert_period_defect(sign, p, std::fabs(s - kTwoPi), q, ro, separatrix_margin);
}

}  // namespace phase_plane

/// Evaluator pair (L, M = L^{-1}) for one sign and exponent.
class PeriodMap {
 public:
  PeriodMap(Sign sign, Exponent p, QuadratureOptions quad = {}, RootOptions roots = {},
            double separatrix_margin = 1e-12)
      : sign_(sign), p_(p), quad_(quad), roots_(roots), margin_(separatrix_margin) {}

  Sign sign() const noexcept { return sign_; }
  Exponent exponent() const noexcept { return p_; }
  const QuadratureOptions& quadrature() const noexcept { return quad_; }
  const RootOptions& roots() const noexcept { return roots_; }
  double separatrix_margin() const noexcept { return margin_; }

  double period(double e) const { return phase_plane::period(sign_, p_, e, quad_, roots_); }
  double invert(double s) const {
    return phase_plane::invert_period(sign_, p_, s, quad_, roots_, margin_);
  }
  double invert_defect(double defect) const {
    return phase_plane::invert_period_defect(sign_, p_, defect, quad_, roots_, margin_);
  }
  /// Period parameter w solving |F(w) - 2 pi| = defect.
  double invert_defect_parameter(double defect) const {
    return phase_plane::invert_defect_parameter(sign_, p_, defect, quad_, roots_, margin_);
  }
  double F(double w) const { return phase_plane::F(sign_, p_, w, quad_); }

  /// Admissible periods: (0, 2 pi] for Plus, [2 pi, inf) for Minus.
  std::pair<double, double> period_range() const {
    if (sign_ == Sign::Plus) return {0.0, kTwoPi};
    return {kTwoPi, std::numeric_limits<double>::infinity()};
  }

 private:
  Sign sign_;
  Exponent p_;
  QuadratureOptions quad_;
  RootOptions roots_;
  double margin_;
};

}  // namespace curlwave
