#pragma once

// The real breather
//
//   psi(r, t) = tau(r) y(sigma(r) (t + a(r)); c(r)),   U(x, t) = psi(|x|, t) x/|x|
//
// with sigma = sqrt(q/s), tau = (q/V)^{1/(p-1)}, c(r) = sqrt(M(g(r))) and a
// radial phase a(r) (zero by default), and the complex monochromatic breather
// e^{i (2 pi/T) t} phi(|x|) x/|x|.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "curlwave/coefficients.hpp"
#include "curlwave/errors.hpp"
#include "curlwave/oscillator.hpp"
#include "curlwave/phase_plane.hpp"

namespace curlwave {

using Vec3 = std::array<double, 3>;
using RadialPhase = std::function<double(double)>;

struct BreatherOptions {
  QuadratureOptions quadrature{};
  RootOptions roots{};
  oscillator::OrbitCacheOptions orbit{};
  double separatrix_margin = 1e-12;
  /// |2 pi - g| at or below this gives c = 0. Negative: 0 for profiles with
  /// a closed-form defect, 1e-13 otherwise.
  double cutoff = -1.0;
};

/// Per-radius data: scalings, orbit label and the cached orbit.
struct RadialState {
  double sigma = 0.0;
  double tau = 0.0;
  double c = 0.0;
  double w = 0.0;       // period parameter of the orbit
  double period = 0.0;  // L(c^2) = g(r)
  std::shared_ptr<oscillator::OrbitFamily> orbit;
};

/// sigma(r) = sqrt(q/s), tau(r) = (q/V)^{1/(p-1)}.
inline std::pair<double, double> sigma_tau(const CoefficientProfile& prof, double r) {
  const double q = prof.q(r).v;
  const double sigma = std::sqrt(q / prof.s(r).v);
  const double tau = std::pow(q / prof.V(r).v, 1.0 / (prof.p() - 1.0));
  return {sigma, tau};
}

/// A constructed breather. Evaluation memoises per-radius orbits in a cache
/// shared between copies, so an instance must not be used from several
/// threads at once.
class Breather {
 public:
  explicit Breather(CoefficientProfile profile, BreatherOptions opts = {})
      : profile_(std::move(profile)),
        map_(profile_.sign(), profile_.p(), opts.quadrature, opts.roots, opts.separatrix_margin),
        opts_(opts),
        cache_(std::make_shared<Cache>()) {
    if (opts_.cutoff < 0.0) opts_.cutoff = profile_.has_exact_defect() ? 0.0 : 1e-13;
  }

  const CoefficientProfile& profile() const noexcept { return profile_; }
  const PeriodMap& period_map() const noexcept { return map_; }
  double T() const noexcept { return profile_.T(); }
  Sign sign() const noexcept { return profile_.sign(); }
  Exponent p() const noexcept { return profile_.p(); }
  bool has_phase() const noexcept { return static_cast<bool>(phase_); }
  double phase(double r) const { return phase_ ? phase_(r) : 0.0; }

  /// U_a(x, t) = U(x, t + a(|x|)); shares the orbit cache.
  Breather phase_shifted(RadialPhase a) const {
    Breather out = *this;
    if (phase_ && a) {
      auto prev = phase_;
      out.phase_ = [prev, a](double r) { return prev(r) + a(r); };
    } else if (a) {
      out.phase_ = std::move(a);
    }
    return out;
  }

  /// Phase induced by starting the orbits on another curve: the orbit through
  /// (0, c) reaches that curve after time b(c), so a(r) = b(c(r)) / sigma(r).
  Breather phase_from_curve(std::function<double(double)> b) const {
    auto self = *this;
    return phase_shifted([self, b](double r) {
      const auto& st = self.state(r);
      return b(st.c) / st.sigma;
    });
  }

  const RadialState& state(double r) const {
    if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("radius must be finite and >= 0");
    auto it = cache_->find(r);
    if (it != cache_->end()) return it->second;
    if (cache_->size() > kCacheLimit) cache_->clear();
    return cache_->emplace(r, build_state(r)).first->second;
  }

  /// c(r) = sqrt(M(g(r))).
  double c(double r) const { return state(r).c; }

  double psi(double r, double t) const {
    const double shift = phase(r);  // may touch the cache; evaluate first
    const auto& st = state(r);
    if (st.c == 0.0) return 0.0;
    return st.tau * (*st.orbit)(st.sigma * (t + shift)).first;
  }

  /// psi and its exact time derivative.
  std::pair<double, double> psi_and_dt(double r, double t) const {
    const double shift = phase(r);
    const auto& st = state(r);
    if (st.c == 0.0) return {0.0, 0.0};
    const auto [y, v] = (*st.orbit)(st.sigma * (t + shift));
    return {st.tau * y, st.tau * st.sigma * v};
  }

  Vec3 U(const Vec3& x, double t) const {
    const double r = std::hypot(x[0], x[1], x[2]);
    if (r == 0.0) return {0.0, 0.0, 0.0};
    const double f = psi(r, t) / r;
    return {f * x[0], f * x[1], f * x[2]};
  }

  /// Upper bound on max_t |psi(r, t)|: tau c, with the extra factor
  /// sqrt((p+1)/(p-1)) on the Minus branch.
  double envelope(double r) const {
    const auto& st = state(r);
    double b = st.tau * st.c;
    if (sign() == Sign::Minus) b *= std::sqrt((p() + 1.0) / (p() - 1.0));
    return b;
  }

  /// max over `n` equally spaced times in one period of |psi(r, .)|.
  double psi_max(double r, int n = 256) const {
    double m = 0.0;
    for (int i = 0; i < n; ++i) m = std::max(m, std::fabs(psi(r, T() * i / n)));
    return m;
  }

 private:
  using Cache = std::unordered_map<double, RadialState>;
  static constexpr std::size_t kCacheLimit = 1024;

  RadialState build_state(double r) const {
    RadialState st;
    std::tie(st.sigma, st.tau) = sigma_tau(profile_, r);
    const double d = r == 0.0 ? 0.0 : profile_.defect(r);
    if (std::fabs(d) <= opts_.cutoff || d == 0.0) {
      st.period = kTwoPi;
      return st;
    }
    const bool right_side = sign() == Sign::Plus ? d > 0.0 : d < 0.0;
    if (!right_side) {
      throw HypothesisError(sign() == Sign::Plus ? "H1" : "H1'",
                            "g(r) lies on the wrong side of 2 pi at r = " + std::to_string(r));
    }
    st.w = map_.invert_defect_parameter(std::fabs(d));
    st.c = std::sqrt(phase_plane::phi_map(p(), st.w, sign()));
    st.period = kTwoPi - d;
    if (st.c > 0.0) {
      st.orbit = std::make_shared<oscillator::OrbitFamily>(sign(), p(), st.c, st.period,
                                                           opts_.orbit);
    }
    return st;
  }

  CoefficientProfile profile_;
  PeriodMap map_;
  BreatherOptions opts_;
  RadialPhase phase_;
  std::shared_ptr<Cache> cache_;
};

inline double c_of_r(const Breather& b, double r) { return b.c(r); }
inline double psi(const Breather& b, double r, double t) { return b.psi(r, t); }
inline Vec3 field_U(const Breather& b, const Vec3& x, double t) { return b.U(x, t); }

/// phi(r) = [+-((2 pi/T)^2 s/q - 1) q/V]^{1/(p-1)}, evaluated through the
/// defect: (2 pi/g)^2 - 1 = d (4 pi - d) / g^2 with d = 2 pi - g.
inline double complex_breather(const CoefficientProfile& prof, double r) {
  if (r == 0.0) return 0.0;
  const double d = prof.defect(r);
  const double g = kTwoPi - d;
  const double bracket = sign_factor(prof.sign()) * d * (2.0 * kTwoPi - d) / (g * g);
  if (bracket < 0.0) {
    throw HypothesisError(prof.sign() == Sign::Plus ? "H1" : "H1'",
                          "monochromatic amplitude bracket is negative at r = " + std::to_string(r));
  }
  return std::pow(bracket * prof.q(r).v / prof.V(r).v, 1.0 / (prof.p() - 1.0));
}

/// -(2 pi/T)^2 s + q +- V |phi|^{p-1}, the algebraic identity defining phi.
inline double complex_breather_identity(const CoefficientProfile& prof, double r) {
  const double om = kTwoPi / prof.T();
  const double phi = complex_breather(prof, r);
  return -om * om * prof.s(r).v + prof.q(r).v +
         sign_factor(prof.sign()) * prof.V(r).v * abs_pow(phi, prof.p() - 1.0);
}

struct DecayFit {
  double rate;  // -slope of log max_t |psi| against r
  double r0;
  double r1;
  std::size_t points;
  bool certifies;  // rate >= profile delta
};

/// Fits log max_t |psi(r, .)| on the radii `r_tail`.
inline DecayFit decay_rate(const Breather& b, const std::vector<double>& r_tail, int n_t = 256) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  DecayFit fit{0.0, HUGE_VAL, 0.0, 0, false};
  for (double r : r_tail) {
    const double m = b.psi_max(r, n_t);
    if (!(m > 0.0)) continue;
    const double y = std::log(m);
    sx += r;
    sy += y;
    sxx += r * r;
    sxy += r * y;
    ++n;
    fit.r0 = std::min(fit.r0, r);
    fit.r1 = std::max(fit.r1, r);
  }
  const double nn = static_cast<double>(n);
  const double den = nn * sxx - sx * sx;
  if (n < 3 || !(den > 0.0)) throw NumericalError("decay fit needs >= 3 tail radii with psi != 0");
  fit.rate = -(nn * sxy - sx * sy) / den;
  fit.points = n;
  fit.certifies = fit.rate >= b.profile().delta();
  return fit;
}

/// n equally spaced radii in [r0, r1].
inline std::vector<double> linear_grid(double r0, double r1, std::size_t n) {
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = r0 + (r1 - r0) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return r;
}

}  // namespace curlwave
