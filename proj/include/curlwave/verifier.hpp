#pragma once

// Finite-difference checks of the constructed fields:
//
//   reduced:  s psi_tt + q psi +- V |psi|^{p-1} psi
//   full:     s U_tt + curl curl U + q U +- V |U|^{p-1} U
//   plus curl U and curl curl U on their own (both vanish for gradient fields)
//
// All stencils are centred and second order. Orders are least-squares slopes
// of log(max residual) against log(step) over the refinement levels.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "curlwave/breather.hpp"
#include "curlwave/coefficients.hpp"
#include "curlwave/errors.hpp"
#include "curlwave/jet.hpp"

namespace curlwave {

using VectorField = std::function<Vec3(const Vec3&, double)>;
using CVec3 = std::array<std::complex<double>, 3>;

namespace verify {

inline double norm(const Vec3& v) { return std::hypot(v[0], v[1], v[2]); }

inline Vec3 shifted(Vec3 x, int i, double a, int j = -1, double b = 0.0) {
  x[i] += a;
  if (j >= 0) x[j] += b;
  return x;
}

inline void check_stencil(const Vec3& x, double h) {
  if (!(h > 0.0)) throw DomainError("FD step must be > 0");
  if (!(norm(x) > 2.0 * h)) throw DomainError("FD stencil would reach the origin: need |x| > 2h");
}

}  // namespace verify

/// Centred curl: (curl U)_i = eps_ijk D_j U_k.
inline Vec3 curl_fd(const VectorField& U, const Vec3& x, double t, double h) {
  verify::check_stencil(x, h);
  // D[j][k] = D_j U_k
  std::array<Vec3, 3> D{};
  for (int j = 0; j < 3; ++j) {
    const Vec3 up = U(verify::shifted(x, j, h), t);
    const Vec3 dn = U(verify::shifted(x, j, -h), t);
    for (int k = 0; k < 3; ++k) D[j][k] = (up[k] - dn[k]) / (2.0 * h);
  }
  return {D[1][2] - D[2][1], D[2][0] - D[0][2], D[0][1] - D[1][0]};
}

/// (curl curl U)_i = sum_j (D_i D_j U_j - D_j^2 U_i) on the 19-point stencil.
inline Vec3 curl_curl_fd(const VectorField& U, const Vec3& x, double t, double h) {
  verify::check_stencil(x, h);
  const Vec3 u0 = U(x, t);
  std::array<Vec3, 3> up{}, dn{};
  for (int j = 0; j < 3; ++j) {
    up[j] = U(verify::shifted(x, j, h), t);
    dn[j] = U(verify::shifted(x, j, -h), t);
  }
  // mixed[i][j] = D_i D_j U_j, i != j
  std::array<Vec3, 3> mixed{};
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      const Vec3 pp = U(verify::shifted(x, i, h, j, h), t);
      const Vec3 pm = U(verify::shifted(x, i, h, j, -h), t);
      const Vec3 mp = U(verify::shifted(x, i, -h, j, h), t);
      const Vec3 mm = U(verify::shifted(x, i, -h, j, -h), t);
      const double s = 1.0 / (4.0 * h * h);
      mixed[i][j] = (pp[j] - pm[j] - mp[j] + mm[j]) * s;
      mixed[j][i] = (pp[i] - pm[i] - mp[i] + mm[i]) * s;
    }
  }
  Vec3 out{};
  for (int i = 0; i < 3; ++i) {
    double acc = 0.0;
    for (int j = 0; j < 3; ++j) {
      if (j == i) continue;
      const double djj = (up[j][i] - 2.0 * u0[i] + dn[j][i]) / (h * h);
      acc += mixed[i][j] - djj;
    }
    out[i] = acc;
  }
  return out;
}

/// s D_t^2 psi + q psi +- V |psi|^{p-1} psi with a centred time difference.
inline double reduced_residual(const Breather& b, double r, double t, double k) {
  if (!(k > 0.0)) throw DomainError("time step must be > 0");
  const auto& prof = b.profile();
  const double p0 = b.psi(r, t);
  const double dtt = (b.psi(r, t + k) - 2.0 * p0 + b.psi(r, t - k)) / (k * k);
  return prof.s(r).v * dtt + prof.q(r).v * p0 +
         sign_factor(b.sign()) * prof.V(r).v * signed_power(p0, b.p());
}

inline VectorField field_of(const Breather& b) {
  return [b](const Vec3& x, double t) { return b.U(x, t); };
}

inline Vec3 full_pde_residual(const Breather& b, const Vec3& x, double t, double h, double k) {
  if (!(k > 0.0)) throw DomainError("time step must be > 0");
  const auto U = field_of(b);
  const Vec3 cc = curl_curl_fd(U, x, t, h);
  const double r = verify::norm(x);
  const auto& prof = b.profile();
  const double s = prof.s(r).v;
  const double q = prof.q(r).v;
  const double V = prof.V(r).v;
  const Vec3 u0 = U(x, t);
  const Vec3 up = U(x, t + k);
  const Vec3 um = U(x, t - k);
  const double mag = abs_pow(verify::norm(u0), b.p() - 1.0);
  Vec3 res{};
  for (int i = 0; i < 3; ++i) {
    const double utt = (up[i] - 2.0 * u0[i] + um[i]) / (k * k);
    res[i] = s * utt + cc[i] + q * u0[i] + sign_factor(b.sign()) * V * mag * u0[i];
  }
  return res;
}

/// phi(|x|) x/|x| for the monochromatic amplitude of `prof`.
inline VectorField monochromatic_amplitude(const CoefficientProfile& prof) {
  return [prof](const Vec3& x, double) {
    const double r = verify::norm(x);
    if (r == 0.0) return Vec3{0.0, 0.0, 0.0};
    const double f = complex_breather(prof, r) / r;
    return Vec3{f * x[0], f * x[1], f * x[2]};
  };
}

/// Residual of e^{i w t} phi(|x|) x/|x|, w = 2 pi / T; the time derivative
/// is exact (-w^2), space by finite differences.
inline CVec3 monochromatic_residual(const CoefficientProfile& prof, const Vec3& x, double t,
                                    double h) {
  const auto A = monochromatic_amplitude(prof);
  const Vec3 cc = curl_curl_fd(A, x, t, h);
  const Vec3 a = A(x, t);
  const double r = verify::norm(x);
  const double om = 2.0 * std::numbers::pi / prof.T();
  const double s = prof.s(r).v;
  const double q = prof.q(r).v;
  const double V = prof.V(r).v;
  const double mag = abs_pow(verify::norm(a), prof.p() - 1.0);
  const std::complex<double> phase = std::polar(1.0, om * t);
  CVec3 out{};
  for (int i = 0; i < 3; ++i) {
    const double real =
        -om * om * s * a[i] + cc[i] + q * a[i] + sign_factor(prof.sign()) * V * mag * a[i];
    out[i] = phase * real;
  }
  return out;
}

// -- Gradient-field derivative formulas ------------------------------------

/// A = (phi' r - phi)/r^2 and B = phi'' - 3A, the coefficients of the
/// first and second derivatives of W(x) = phi(|x|) x/|x|:
///   d_j W_i       = A x_i x_j / r + (phi/r) delta_ij
///   d_k d_j W_i   = B x_i x_j x_k / r^3 + (A/r)(delta_ik x_j + delta_jk x_i + delta_ij x_k)
struct RadialCoefficients {
  double A;
  double B;
};

using RadialJetFn = std::function<Jet<double>(double)>;

inline RadialCoefficients radial_field_coefficients(const RadialJetFn& phi, double r) {
  const auto j = phi(r);
  const double A = (j.d1 * r - j.v) / (r * r);
  return {A, j.d2 - 3.0 * A};
}

struct DerivativeCheck {
  double r;
  double first_error;   // max |analytic - FD| over d_j W_i
  double second_error;  // max |analytic - FD| over d_k d_j W_i
  double first_scale;   // max |FD first derivative|
  RadialCoefficients coeffs;
};

inline DerivativeCheck radial_field_derivative_check(const RadialJetFn& phi, const Vec3& x, double h) {
  const double r = verify::norm(x);
  if (!(r > 0.0)) throw DomainError("derivative check needs |x| > 0");
  if (!(h > 0.0)) throw DomainError("FD step must be > 0");
  auto W = [&](const Vec3& y) {
    const double ry = verify::norm(y);
    const double f = phi(ry).v / ry;
    return Vec3{f * y[0], f * y[1], f * y[2]};
  };
  const auto j0 = phi(r);
  const auto co = radial_field_coefficients(phi, r);
  const double f = j0.v / r;
  auto delta = [](int a, int b) { return a == b ? 1.0 : 0.0; };

  DerivativeCheck out{r, 0.0, 0.0, 0.0, co};
  const Vec3 w0 = W(x);
  std::array<Vec3, 3> up{}, dn{};
  for (int j = 0; j < 3; ++j) {
    up[j] = W(verify::shifted(x, j, h));
    dn[j] = W(verify::shifted(x, j, -h));
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double fd = (up[j][i] - dn[j][i]) / (2.0 * h);
      const double an = co.A * x[i] * x[j] / r + f * delta(i, j);
      out.first_error = std::max(out.first_error, std::fabs(fd - an));
      out.first_scale = std::max(out.first_scale, std::fabs(fd));
    }
  }
  for (int j = 0; j < 3; ++j) {
    for (int k = j; k < 3; ++k) {
      Vec3 fd{};
      if (j == k) {
        for (int i = 0; i < 3; ++i) fd[i] = (up[j][i] - 2.0 * w0[i] + dn[j][i]) / (h * h);
      } else {
        const Vec3 pp = W(verify::shifted(x, j, h, k, h));
        const Vec3 pm = W(verify::shifted(x, j, h, k, -h));
        const Vec3 mp = W(verify::shifted(x, j, -h, k, h));
        const Vec3 mm = W(verify::shifted(x, j, -h, k, -h));
        for (int i = 0; i < 3; ++i) fd[i] = (pp[i] - pm[i] - mp[i] + mm[i]) / (4.0 * h * h);
      }
      for (int i = 0; i < 3; ++i) {
        const double an = co.B * x[i] * x[j] * x[k] / (r * r * r) +
                          co.A / r * (delta(i, k) * x[j] + delta(j, k) * x[i] + delta(i, j) * x[k]);
        out.second_error = std::max(out.second_error, std::fabs(fd[i] - an));
      }
    }
  }
  return out;
}

// -- Refinement sweeps -----------------------------------------------------

struct ResidualReport {
  std::string name;
  std::vector<double> h;  // spatial steps (0 when not used)
  std::vector<double> k;  // temporal steps (0 when not used)
  std::size_t points = 0;
  std::vector<double> max_norm;
  std::vector<double> l2_norm;  // root mean square over the sample points
  double order = 0.0;
  double order_lo = 1.8;
  double order_hi = 2.2;
  bool pass = false;
};

/// Least-squares slope of log(res) against log(step).
inline double fit_order(const std::vector<double>& steps, const std::vector<double>& res) {
  if (steps.size() != res.size() || steps.size() < 2) {
    throw DomainError("order fit needs matching step and residual lists of length >= 2");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(steps.size());
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (!(res[i] > 0.0) || !(steps[i] > 0.0)) return std::nan("");
    const double x = std::log(steps[i]);
    const double y = std::log(res[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct SamplePoint {
  Vec3 x;
  double t;
};

/// Seeded spacetime samples with |x| uniform in [r_min, r_max], isotropic
/// directions and t uniform in [0, T).
inline std::vector<SamplePoint> sample_points(std::size_t n, std::uint64_t seed, double r_min,
                                              double r_max, double T) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> ur(r_min, r_max);
  std::uniform_real_distribution<double> ut(0.0, T);
  std::vector<SamplePoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vec3 d{gauss(rng), gauss(rng), gauss(rng)};
    const double len = verify::norm(d);
    const double r = ur(rng);
    out.push_back({{r * d[0] / len, r * d[1] / len, r * d[2] / len}, ut(rng)});
  }
  return out;
}

/// Evaluates `residual(point, level)` on every sample and level.
inline ResidualReport sweep(std::string name, const std::vector<SamplePoint>& pts,
                            std::vector<double> h, std::vector<double> k,
                            const std::function<double(const SamplePoint&, std::size_t)>& residual) {
  ResidualReport rep;
  rep.name = std::move(name);
  rep.points = pts.size();
  const std::size_t levels = std::max(h.size(), k.size());
  for (std::size_t l = 0; l < levels; ++l) {
    double mx = 0.0;
    double sq = 0.0;
    for (const auto& pt : pts) {
      const double v = residual(pt, l);
      mx = std::max(mx, v);
      sq += v * v;
    }
    rep.max_norm.push_back(mx);
    rep.l2_norm.push_back(std::sqrt(sq / static_cast<double>(pts.size())));
  }
  rep.h = std::move(h);
  rep.k = std::move(k);
  const auto& steps = rep.h.empty() || rep.h.front() == 0.0 ? rep.k : rep.h;
  rep.order = fit_order(steps, rep.max_norm);
  rep.pass = rep.order >= rep.order_lo && rep.order <= rep.order_hi;
  return rep;
}

struct VerifyOptions {
  std::vector<double> steps{0.04, 0.02, 0.01};  // h = k per level
  std::size_t points = 20;
  std::uint64_t seed = 20240611;
  double r_min = 0.5;
  double r_max = 3.0;
};

struct BreatherVerification {
  ResidualReport reduced;
  ResidualReport full;
  ResidualReport curl_curl;
  ResidualReport curl;
  bool pass() const { return reduced.pass && full.pass && curl_curl.pass && curl.pass; }
};

inline BreatherVerification verify_breather(const Breather& b, const VerifyOptions& o = {}) {
  const auto pts = sample_points(o.points, o.seed, o.r_min, o.r_max, b.T());
  const auto U = field_of(b);
  const std::vector<double> zeros(o.steps.size(), 0.0);
  BreatherVerification v;
  v.reduced = sweep("reduced", pts, zeros, o.steps, [&](const SamplePoint& pt, std::size_t l) {
    return std::fabs(reduced_residual(b, verify::norm(pt.x), pt.t, o.steps[l]));
  });
  v.full = sweep("full", pts, o.steps, o.steps, [&](const SamplePoint& pt, std::size_t l) {
    return verify::norm(full_pde_residual(b, pt.x, pt.t, o.steps[l], o.steps[l]));
  });
  v.curl_curl = sweep("curl_curl", pts, o.steps, zeros, [&](const SamplePoint& pt, std::size_t l) {
    return verify::norm(curl_curl_fd(U, pt.x, pt.t, o.steps[l]));
  });
  v.curl = sweep("curl", pts, o.steps, zeros, [&](const SamplePoint& pt, std::size_t l) {
    return verify::norm(curl_fd(U, pt.x, pt.t, o.steps[l]));
  });
  return v;
}

inline ResidualReport verify_monochromatic(const CoefficientProfile& prof,
                                           const VerifyOptions& o = {}) {
  const auto pts = sample_points(o.points, o.seed, o.r_min, o.r_max, prof.T());
  const std::vector<double> zeros(o.steps.size(), 0.0);
  return sweep("monochromatic", pts, o.steps, zeros, [&](const SamplePoint& pt, std::size_t l) {
    const auto r = monochromatic_residual(prof, pt.x, pt.t, o.steps[l]);
    return std::sqrt(std::norm(r[0]) + std::norm(r[1]) + std::norm(r[2]));
  });
}

}  // namespace curlwave
