#pragma once

// Leading-order behaviour of the inverse period map near s = 2 pi:
//
//   M(s)    ~ alpha d^{2/(p-1)}
//   sqrtM   ~ sqrt(alpha) d^{1/(p-1)}
//   M'(s)   ~ -+ 2 alpha/(p-1) d^{(3-p)/(p-1)}
//   sqrtM'  ~ -+ sqrt(alpha)/(p-1) d^{(2-p)/(p-1)}
//   M''(s)  ~ 2 alpha (3-p)/(p-1)^2 d^{(4-2p)/(p-1)}
//   sqrtM'' ~ sqrt(alpha) (2-p)/(p-1)^2 d^{(3-2p)/(p-1)}
//
// with d = |s - 2 pi| and the upper sign for Plus (s < 2 pi).

#include <algorithm>
#include <cmath>
#include <vector>

#include "curlwave/errors.hpp"
#include "curlwave/phase_plane.hpp"

namespace curlwave::expansions {

struct ExpansionCoefficients {
  Sign sign;
  double p;
  double alpha_tilde;  // 1 / |F'(0)|
  double beta_tilde;   // F''(0)
  double alpha;
};

struct LeadingTerms {
  double M;
  double sqrtM;
  double Mprime;
  double sqrtM_prime;
  double Msecond;
  double sqrtM_second;
};

inline ExpansionCoefficients compute_constants(Sign sign, Exponent p,
                                               const QuadratureOptions& q = {}) {
  const double fp = phase_plane::F_prime(sign, p, 0.0, q);
  const double at = 1.0 / std::fabs(fp);
  const double bt = phase_plane::F_second(sign, p, 0.0, q);
  const double alpha = std::pow(0.5 * (p + 1.0) * at, 2.0 / (p - 1.0));
  return {sign, p, at, bt, alpha};
}

/// d = |s - 2 pi|, requiring s strictly on the sign's side of 2 pi.
inline double side_distance(Sign sign, double s) {
  const double d = sign == Sign::Plus ? kTwoPi - s : s - kTwoPi;
  if (!(d > 0.0)) {
    throw DomainError(sign == Sign::Plus ? "Plus expansion needs s < 2 pi"
                                         : "Minus expansion needs s > 2 pi");
  }
  return d;
}

/// Leading terms at distance d from 2 pi.
inline LeadingTerms leading_from_defect(const ExpansionCoefficients& k, double d) {
  const double p = k.p;
  const double sg = sign_factor(k.sign);
  const double q = p - 1.0;
  const double ra = std::sqrt(k.alpha);
  LeadingTerms t{};
  t.M = k.alpha * std::pow(d, 2.0 / q);
  t.sqrtM = ra * std::pow(d, 1.0 / q);
  t.Mprime = -sg * 2.0 * k.alpha / q * std::pow(d, (3.0 - p) / q);
  t.sqrtM_prime = -sg * ra / q * std::pow(d, (2.0 - p) / q);
  t.Msecond = 2.0 * k.alpha * (3.0 - p) / (q * q) * std::pow(d, (4.0 - 2.0 * p) / q);
  t.sqrtM_second = ra * (2.0 - p) / (q * q) * std::pow(d, (3.0 - 2.0 * p) / q);
  return t;
}

inline LeadingTerms m_leading(Sign sign, Exponent p, double s, const QuadratureOptions& q = {}) {
  const double d = side_distance(sign, s);
  return leading_from_defect(compute_constants(sign, p, q), d);
}

struct ExpansionFit {
  Sign sign;
  double p;
  double exponent;           // fitted slope of log M against log d
  double exponent_expected;  // 2/(p-1)
  double prefactor;          // exp(intercept)
  double alpha;
  double max_rel_deviation;  // max |M / leading - 1| over the grid
  double d_min;
  double d_max;
  std::size_t samples;
  double mprime_at;  // d at which M' is compared
  double mprime_fd;
  double mprime_leading;
  double exponent_rel_error;
  double prefactor_rel_error;
  double mprime_rel_error;
  bool pass;
};

struct ExpansionWindows {
  double exponent_rel = 0.01;
  double prefactor_rel = 0.02;
  double mprime_rel = 0.05;
};

/// `n` geometrically spaced defects in [d_min, d_max].
inline std::vector<double> geometric_defects(double d_min, double d_max, std::size_t n) {
  if (!(d_min > 0.0 && d_max > d_min) || n < 2) {
    throw ConfigError("defect grid needs 0 < d_min < d_max and n >= 2");
  }
  std::vector<double> d(n);
  const double step = std::log(d_max / d_min) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) d[i] = d_min * std::exp(step * static_cast<double>(i));
  d.back() = d_max;
  return d;
}

/// Fits log M against log d on the given s grid and compares M' with a
/// centred difference of the numerical inverse at d = `mprime_at`.
inline ExpansionFit validate_expansion(Sign sign, Exponent p, const std::vector<double>& s_grid,
                                       double mprime_at = 1e-4, const QuadratureOptions& q = {},
                                       const ExpansionWindows& win = {}) {
  if (s_grid.size() < 3) throw ConfigError("expansion fit needs at least 3 grid points");
  const auto k = compute_constants(sign, p, q);
  ExpansionFit fit{};
  fit.sign = sign;
  fit.p = p;
  fit.alpha = k.alpha;
  fit.exponent_expected = 2.0 / (p - 1.0);
  fit.samples = s_grid.size();
  fit.d_min = HUGE_VAL;
  fit.d_max = 0.0;

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (double s : s_grid) {
    const double d = side_distance(sign, s);
    const double m = phase_plane::invert_period_defect(sign, p, d, q);
    const double x = std::log(d);
    const double y = std::log(m);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    fit.d_min = std::min(fit.d_min, d);
    fit.d_max = std::max(fit.d_max, d);
    fit.max_rel_deviation =
        std::max(fit.max_rel_deviation, std::fabs(m / leading_from_defect(k, d).M - 1.0));
  }
  const double n = static_cast<double>(s_grid.size());
  const double den = n * sxx - sx * sx;
  if (!(den > 0.0)) throw ConfigError("expansion fit needs distinct grid points");
  fit.exponent = (n * sxy - sx * sy) / den;
  fit.prefactor = std::exp((sy - fit.exponent * sx) / n);

  // dM/ds = -+ dM/dd
  const double d0 = mprime_at;
  const double h = 1e-2 * d0;
  const double mp = phase_plane::invert_period_defect(sign, p, d0 + h, q);
  const double mm = phase_plane::invert_period_defect(sign, p, d0 - h, q);
  fit.mprime_at = d0;
  fit.mprime_fd = -sign_factor(sign) * (mp - mm) / (2.0 * h);
  fit.mprime_leading = leading_from_defect(k, d0).Mprime;

  fit.exponent_rel_error = std::fabs(fit.exponent / fit.exponent_expected - 1.0);
  fit.prefactor_rel_error = std::fabs(fit.prefactor / fit.alpha - 1.0);
  fit.mprime_rel_error = std::fabs(fit.mprime_fd / fit.mprime_leading - 1.0);
  fit.pass = fit.exponent_rel_error <= win.exponent_rel &&
             fit.prefactor_rel_error <= win.prefactor_rel && fit.mprime_rel_error <= win.mprime_rel;
  return fit;
}

/// The default grid: 25 defects geometric in [1e-6, 1e-2], mapped to s.
inline std::vector<double> default_s_grid(Sign sign, std::size_t n = 25) {
  std::vector<double> s;
  for (double d : geometric_defects(1e-6, 1e-2, n)) {
    s.push_back(sign == Sign::Plus ? kTwoPi - d : kTwoPi + d);
  }
  return s;
}

}  // namespace curlwave::expansions
