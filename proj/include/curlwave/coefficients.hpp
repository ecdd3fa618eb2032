#pragma once

// Radial coefficient profiles (s, q, V) and grid checks of the hypotheses the
// construction needs:
//
//   H1   T sqrt(q/s) < 2 pi for r > 0             (Plus)
//   H1'  T sqrt(q/s) > 2 pi for r > 0             (Minus)
//   H2   |2 pi - T sqrt(q/s)|^{1/(p-1)} -> 0 in C^2 as r -> 0
//   H3   |2 pi - T sqrt(q/s)| e^{delta (p-1) r} bounded
//   H4   q/V bounded
//
// The checks sample a grid; they are evidence, not proofs.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "curlwave/errors.hpp"
#include "curlwave/jet.hpp"
#include "curlwave/phase_plane.hpp"
#include "curlwave/radial_expr.hpp"

namespace curlwave {

class CoefficientProfile {
 public:
  /// `defect`, when given, must equal 2 pi - T sqrt(q/s) in closed form; it
  /// replaces the cancelling difference near r = 0 and in the tail.
  CoefficientProfile(Exponent p, Sign sign, RadialExpr s, RadialExpr q, RadialExpr V,
                     double delta, std::optional<RadialExpr> defect = std::nullopt,
                     std::string family = "custom")
      : p_(p),
        sign_(sign),
        s_(std::move(s)),
        q_(std::move(q)),
        V_(std::move(V)),
        delta_(delta),
        defect_(std::move(defect)),
        family_(std::move(family)) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError("delta must be > 0");
    const auto s0 = s_.jet(0.0);
    const auto q0 = q_.jet(0.0);
    const auto v0 = V_.jet(0.0);
    if (!(s0.v > 0.0 && q0.v > 0.0 && v0.v > 0.0)) {
      throw ConfigError("s, q, V must be positive at r = 0");
    }
    for (const auto& j : {s0, q0, v0}) {
      if (std::fabs(j.d1) > 1e-12) {
        throw ConfigError("radial coefficients need a vanishing derivative at r = 0");
      }
    }
    T_ = kTwoPi * std::sqrt(s0.v / q0.v);
  }

  Exponent p() const noexcept { return p_; }
  Sign sign() const noexcept { return sign_; }
  double delta() const noexcept { return delta_; }
  double T() const noexcept { return T_; }
  const std::string& family() const noexcept { return family_; }
  bool has_exact_defect() const noexcept { return defect_.has_value(); }

  Jet<double> s(double r) const { return s_.jet(r); }
  Jet<double> q(double r) const { return q_.jet(r); }
  Jet<double> V(double r) const { return V_.jet(r); }
  const RadialExpr& s_expr() const noexcept { return s_; }
  const RadialExpr& q_expr() const noexcept { return q_; }
  const RadialExpr& V_expr() const noexcept { return V_; }

  /// g(r) = T sqrt(q(r)/s(r)).
  double g(double r) const { return T_ * std::sqrt(q_(r) / s_(r)); }

  /// 2 pi - g(r), signed.
  double defect(double r) const {
    if (defect_) return (*defect_)(r);
    // 1 - sqrt(rho) = (1 - rho)/(1 + sqrt(rho)), rho = (q s0)/(q0 s)
    const double s0 = s_(0.0);
    const double q0 = q_(0.0);
    const double qr = q_(r);
    const double sr = s_(r);
    const double rho = (qr * s0) / (q0 * sr);
    const double num = (q0 * sr - qr * s0) / (q0 * sr);
    return kTwoPi * num / (1.0 + std::sqrt(rho));
  }

  /// |defect| at or below this is indistinguishable from zero.
  double defect_resolution() const noexcept {
    return defect_ ? std::numeric_limits<double>::denorm_min() : 1e-13;
  }

  /// Same coefficients under the other equation sign.
  CoefficientProfile with_sign(Sign s) const {
    CoefficientProfile out = *this;
    out.sign_ = s;
    return out;
  }

  CoefficientProfile with_delta(double delta) const {
    return CoefficientProfile(p_, sign_, s_, q_, V_, delta, defect_, family_);
  }

 private:
  Exponent p_;
  Sign sign_;
  RadialExpr s_;
  RadialExpr q_;
  RadialExpr V_;
  double delta_;
  std::optional<RadialExpr> defect_;
  std::string family_;
  double T_ = kTwoPi;
};

struct BuiltinParams {
  double a = 1.0;
  int m = 3;
  double beta = 1.0;
};

/// eps(r) = a r^{2m} exp(-beta r^2) / (1 + r^{2m}).
inline RadialExpr builtin_epsilon(const BuiltinParams& b) {
  const auto r2m = RadialExpr::power(2 * b.m);
  return RadialExpr::constant(b.a) * r2m * RadialExpr::gauss(b.beta) /
         (RadialExpr::constant(1.0) + r2m);
}

/// s = V = 1, g = 2 pi -+ eps, q = (g / 2 pi)^2, so T = 2 pi.
///
/// `construction` picks the side of 2 pi; `equation` is the sign of the
/// nonlinearity and normally equals it.
inline CoefficientProfile builtin_profile(Exponent p, Sign construction, const BuiltinParams& b,
                                          double delta = 1.0,
                                          std::optional<Sign> equation = std::nullopt) {
  // a = 0 is the degenerate member eps = 0; H1 rejects it, not the parser
  if (!(b.a >= 0.0 && b.a < kTwoPi)) throw ConfigError("builtin profile needs 0 <= a < 2 pi");
  if (!(b.beta > 0.0) || !std::isfinite(b.beta)) throw ConfigError("builtin profile needs beta > 0");
  if (b.m < 1) throw ConfigError("builtin profile needs m >= 1");
  const auto eps = builtin_epsilon(b);
  const double sg = sign_factor(construction);
  const auto u = RadialExpr::constant(1.0) + RadialExpr::constant(-sg / kTwoPi) * eps;
  const auto defect = RadialExpr::constant(sg) * eps;
  return CoefficientProfile(p, equation.value_or(construction), RadialExpr::constant(1.0), u * u,
                            RadialExpr::constant(1.0), delta, defect, "builtin");
}

/// The builtin family satisfies H2 only for m > p - 1.
inline bool builtin_regular(Exponent p, const BuiltinParams& b) { return b.m > p - 1.0; }

inline double g_of_r(const CoefficientProfile& prof, double r) { return prof.g(r); }

/// Log-spaced points on [1e-4, 1e-1) followed by a uniform grid on
/// [0.1, r_max]; r_max defaults to max(20, 20/delta).
inline std::vector<double> default_radial_grid(double delta, std::size_t n_log = 40,
                                               std::size_t n_lin = 400, double r_max = 0.0) {
  if (r_max <= 0.0) r_max = std::max(20.0, 20.0 / delta);
  std::vector<double> r;
  for (std::size_t i = 0; i < n_log; ++i) {
    r.push_back(1e-4 * std::pow(1e3, static_cast<double>(i) / static_cast<double>(n_log)));
  }
  for (std::size_t i = 0; i <= n_lin; ++i) {
    r.push_back(0.1 + (r_max - 0.1) * static_cast<double>(i) / static_cast<double>(n_lin));
  }
  return r;
}

struct HypothesisReport {
  bool positive_ok = true;  // s, q, V > 0 on the grid
  bool h1_ok = false;       // H1 for Plus profiles, H1' for Minus
  bool h1_below = false;    // H1: g < 2 pi on every resolved radius
  bool h1_above = false;    // H1': g > 2 pi on every resolved radius
  bool h2_ok = false;
  bool h3_ok = false;
  bool h4_ok = false;

  double h1_worst_r = 0.0;  // radius of the least favourable defect
  double h1_worst_defect = 0.0;
  double h2_worst_r = 0.0;
  double h2_worst_value = 0.0;  // largest of |w|, |w'|, |w''| at the smallest radius
  double h3_slope = 0.0;        // fitted d log|defect| / dr on the tail
  double h3_certified_delta = 0.0;
  double h3_tail_start = 0.0;
  double h3_tail_end = 0.0;
  double h4_sup = 0.0;
  double h4_worst_r = 0.0;

  bool all_ok() const { return positive_ok && h1_ok && h2_ok && h3_ok && h4_ok; }

  /// Name of the first failing hypothesis, or "" if all pass.
  std::string first_failure(Sign sign) const {
    if (!h1_ok) return sign == Sign::Plus ? "H1" : "H1'";
    if (!h2_ok) return "H2";
    if (!h3_ok) return "H3";
    if (!h4_ok) return "H4";
    if (!positive_ok) return "positivity";
    return "";
  }
};

struct H2Options {
  std::vector<double> radii{1e-1, 1e-2, 1e-3, 1e-4};
  double final_bound = 1e-3;
};

namespace detail {

/// Sign pattern of the defect along the grid. Unresolved values may only sit
/// at the head (near 0) or the tail (decay below resolution).
inline bool strict_side(const std::vector<double>& r, const std::vector<double>& d, double res,
                        double want, double& worst_r, double& worst_d) {
  std::size_t first = d.size();
  std::size_t last = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (std::fabs(d[i]) > res) {
      first = std::min(first, i);
      last = i;
    }
  }
  if (first == d.size()) {
    worst_r = r.empty() ? 0.0 : r.front();
    worst_d = d.empty() ? 0.0 : d.front();
    return false;
  }
  bool ok = true;
  double worst = HUGE_VAL;
  for (std::size_t i = first; i <= last; ++i) {
    const double signed_d = want * d[i];
    if (signed_d < worst) {
      worst = signed_d;
      worst_r = r[i];
      worst_d = d[i];
    }
    if (!(signed_d > res)) ok = false;
  }
  return ok;
}

}  // namespace detail

/// Grid check of H1/H1', H2, H3, H4. The grid must contain positive radii
/// only; r = 0 is excluded from the strict inequalities.
inline HypothesisReport check_hypotheses(const CoefficientProfile& prof,
                                         const std::vector<double>& r_grid,
                                         const H2Options& h2 = {}) {
  HypothesisReport rep;
  const double p = prof.p();
  std::vector<double> rs;
  std::vector<double> ds;
  for (double r : r_grid) {
    if (!(r > 0.0)) continue;
    rs.push_back(r);
    ds.push_back(prof.defect(r));
    const double sv = prof.s(r).v;
    const double qv = prof.q(r).v;
    const double vv = prof.V(r).v;
    if (!(sv > 0.0 && qv > 0.0 && vv > 0.0)) rep.positive_ok = false;
    const double ratio = qv / vv;
    if (!(ratio <= rep.h4_sup)) {
      rep.h4_sup = ratio;
      rep.h4_worst_r = r;
    }
  }
  std::vector<std::size_t> order(rs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return rs[a] < rs[b]; });
  std::vector<double> r_sorted;
  std::vector<double> d_sorted;
  for (auto i : order) {
    r_sorted.push_back(rs[i]);
    d_sorted.push_back(ds[i]);
  }
  const double res = prof.defect_resolution();

  double wr = 0.0, wd = 0.0;
  rep.h1_below = detail::strict_side(r_sorted, d_sorted, res, +1.0, wr, wd);
  const double wr_below = wr, wd_below = wd;
  rep.h1_above = detail::strict_side(r_sorted, d_sorted, res, -1.0, wr, wd);
  if (prof.sign() == Sign::Plus) {
    rep.h1_ok = rep.h1_below;
    rep.h1_worst_r = wr_below;
    rep.h1_worst_defect = wd_below;
  } else {
    rep.h1_ok = rep.h1_above;
    rep.h1_worst_r = wr;
    rep.h1_worst_defect = wd;
  }

  // H2: w = |defect|^{1/(p-1)}, centred differences with step r/4
  auto w = [&](double r) { return abs_pow(prof.defect(r), 1.0 / (p - 1.0)); };
  rep.h2_ok = !h2.radii.empty();
  double prev = HUGE_VAL;
  for (double r : h2.radii) {
    const double h = 0.25 * r;
    const double w0 = w(r);
    const double wp = w(r + h);
    const double wm = w(r - h);
    const double d1 = (wp - wm) / (2.0 * h);
    const double d2 = (wp - 2.0 * w0 + wm) / (h * h);
    const double worst = std::max({std::fabs(w0), std::fabs(d1), std::fabs(d2)});
    if (worst > prev) rep.h2_ok = false;
    prev = worst;
    rep.h2_worst_r = r;
    rep.h2_worst_value = worst;
  }
  if (!(prev < h2.final_bound)) rep.h2_ok = false;

  // H3: slope of log|defect| over the upper half of the resolved range
  std::size_t last = 0;
  bool any = false;
  for (std::size_t i = 0; i < d_sorted.size(); ++i) {
    if (std::fabs(d_sorted[i]) > res) {
      last = i;
      any = true;
    }
  }
  if (any) {
    const double r_end = r_sorted[last];
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (std::size_t i = 0; i <= last; ++i) {
      if (r_sorted[i] < 0.5 * r_end || !(std::fabs(d_sorted[i]) > res)) continue;
      const double x = r_sorted[i];
      const double y = std::log(std::fabs(d_sorted[i]));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      if (n == 0) rep.h3_tail_start = x;
      ++n;
    }
    rep.h3_tail_end = r_end;
    const double den = n * sxx - sx * sx;
    if (n >= 3 && den > 0.0) {
      rep.h3_slope = (n * sxy - sx * sy) / den;
      rep.h3_certified_delta = std::max(0.0, -rep.h3_slope / (p - 1.0));
      rep.h3_ok = rep.h3_slope <= -prof.delta() * (p - 1.0);
    }
  }

  // a grid maximum is always finite; growth by more than 2x over the last
  // tenth of the grid is taken as evidence that q/V is unbounded
  rep.h4_ok = std::isfinite(rep.h4_sup) && rep.positive_ok;
  if (r_sorted.size() >= 10) {
    const double r_hi = r_sorted.back();
    const double r_lo = r_hi - 0.1 * (r_hi - r_sorted.front());
    auto ratio = [&](double r) { return prof.q(r).v / prof.V(r).v; };
    if (ratio(r_hi) > 2.0 * ratio(r_lo)) rep.h4_ok = false;
  }
  return rep;
}

/// Profile from the JSON schema
///   {"p": real, "sign": "plus"|"minus", "family": "builtin"|"custom",
///    "params": {...}, "delta": real}
/// builtin params: {"a", "m", "beta"}; custom params: {"s", "q", "V"} as
/// radial expressions.
inline CoefficientProfile profile_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("profile must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (k != "p" && k != "sign" && k != "family" && k != "params" && k != "delta") {
      throw ConfigError("unknown profile field '" + k + "'");
    }
  }
  auto need = [&](const char* k) -> const nlohmann::json& {
    if (!j.contains(k)) throw ConfigError(std::string("profile is missing '") + k + "'");
    return j.at(k);
  };
  if (!need("p").is_number()) throw ConfigError("'p' must be a number");
  if (!need("sign").is_string()) throw ConfigError("'sign' must be a string");
  if (!need("family").is_string()) throw ConfigError("'family' must be a string");
  const auto& params = need("params");
  if (!params.is_object()) throw ConfigError("'params' must be an object");
  const Exponent p(need("p").get<double>());
  const Sign sign = parse_sign(j.at("sign").get<std::string>());
  double delta = 1.0;
  if (j.contains("delta")) {
    if (!j.at("delta").is_number()) throw ConfigError("'delta' must be a number");
    delta = j.at("delta").get<double>();
  }
  const auto family = j.at("family").get<std::string>();

  auto check_keys = [&](std::initializer_list<const char*> allowed) {
    for (const auto& [k, v] : params.items()) {
      bool known = false;
      for (const char* a : allowed) known = known || k == a;
      if (!known) throw ConfigError("unknown " + family + " parameter '" + k + "'");
    }
  };
  if (family == "builtin") {
    check_keys({"a", "m", "beta"});
    BuiltinParams b;
    if (params.contains("a")) b.a = params.at("a").get<double>();
    if (params.contains("m")) {
      if (!params.at("m").is_number_integer()) throw ConfigError("'m' must be an integer");
      b.m = params.at("m").get<int>();
    }
    if (params.contains("beta")) b.beta = params.at("beta").get<double>();
    return builtin_profile(p, sign, b, delta);
  }
  if (family == "custom") {
    check_keys({"s", "q", "V"});
    for (const char* k : {"s", "q", "V"}) {
      if (!params.contains(k)) throw ConfigError(std::string("custom profile needs '") + k + "'");
    }
    return CoefficientProfile(p, sign, RadialExpr::from_json(params.at("s")),
                              RadialExpr::from_json(params.at("q")),
                              RadialExpr::from_json(params.at("V")), delta);
  }
  throw ConfigError("unknown profile family '" + family + "'");
}

}  // namespace curlwave
