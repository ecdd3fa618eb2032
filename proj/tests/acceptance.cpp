// Acceptance run: one PASS/FAIL line per criterion. Where a criterion states
// a runtime budget, exceeding it fails the criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "curlwave/breather.hpp"
#include "curlwave/coefficients.hpp"
#include "curlwave/expansions.hpp"
#include "curlwave/oscillator.hpp"
#include "curlwave/phase_plane.hpp"
#include "curlwave/verifier.hpp"

using namespace curlwave;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

const std::vector<double> kExponents{1.5, 2.0, 3.0, 5.0};
const Sign kSigns[] = {Sign::Plus, Sign::Minus};

Outcome period_endpoint() {
  // The offset from 2 pi is ~ |F'(0)| w(e) with w ~ e^{(p-1)/2}, so at
  // e = 1e-10 it is only below 1e-6 for p above about 2.3. The line reports
  // the per-exponent worst offset and its ratio to that leading term.
  double worst = 0.0;
  std::string detail = "max |L(1e-10) - 2pi|:";
  for (double pv : kExponents) {
    const Exponent p(pv);
    double wp = 0.0, ratio = 0.0;
    for (Sign s : kSigns) {
      const double dev = std::fabs(phase_plane::period(s, p, 1e-10) - kTwoPi);
      const double lead =
          std::fabs(phase_plane::F_prime(s, p, 0.0)) * phase_plane::period_parameter(s, p, 1e-10);
      wp = std::max(wp, dev);
      if (dev > 1e-13) ratio = std::max(ratio, dev / lead);  // else rounding dominates
    }
    worst = std::max(worst, wp);
    detail += fmt(" p=%g %.1e", pv, wp) + (ratio > 0.0 ? fmt(" (%.3f x lead)", ratio) : "") +
              (wp <= 1e-6 ? "" : "!");
  }
  return {worst <= 1e-6, detail};
}

Outcome alpha_anchor() {
  const double oracle = 4.0 / (3.0 * std::numbers::pi);
  const double ap = expansions::compute_constants(Sign::Plus, Exponent(3)).alpha;
  const double am = expansions::compute_constants(Sign::Minus, Exponent(3)).alpha;
  const double ep = std::fabs(ap - oracle);
  const double em = std::fabs(am - oracle);
  return {ep <= 1e-8 && em <= 1e-9, fmt("|alpha+ - 4/(3pi)| = %.2e, |alpha- - 4/(3pi)| = %.2e", ep, em)};
}

Outcome expansion_fits() {
  bool ok = true;
  double we = 0.0, wp = 0.0;
  for (double p : {2.0, 3.0}) {
    for (Sign s : kSigns) {
      const auto fit = expansions::validate_expansion(s, Exponent(p), expansions::default_s_grid(s));
      ok = ok && fit.d_min <= 1.0001e-6 && fit.d_max >= 0.9999e-2;
      ok = ok && fit.exponent_rel_error <= 0.01 && fit.prefactor_rel_error <= 0.02;
      we = std::max(we, fit.exponent_rel_error);
      wp = std::max(wp, fit.prefactor_rel_error);
    }
  }
  return {ok, fmt("worst exponent rel err %.2e (<= 1e-2), prefactor rel err %.2e (<= 2e-2)", we, wp)};
}

Outcome dual_oracles() {
  const Exponent p(3);
  double worst = 0.0;
  for (Sign s : kSigns) {
    const double top = s == Sign::Plus ? 2.0 : 0.95 * phase_plane::separatrix_energy(p);
    for (int i = 1; i <= 20; ++i) {
      const double e = top * i / 20.0;
      worst = std::max(worst, std::fabs(phase_plane::period(s, p, e) -
                                        oscillator::return_map_period(s, p, e)));
    }
  }
  return {worst <= 1e-6, fmt("max |L_quad - L_return| = %.2e over 40 energies", worst)};
}

Outcome roundtrip() {
  const Exponent p(3);
  double worst = 0.0;
  for (Sign s : kSigns) {
    // 50 periods per sign, |s - 2 pi| geometric in [1e-8, 4]
    const auto ds = expansions::geometric_defects(1e-8, 4.0, 50);
    for (double d : ds) {
      const double target = s == Sign::Plus ? kTwoPi - d : kTwoPi + d;
      const double e = phase_plane::invert_period(s, p, target);
      worst = std::max(worst, std::fabs(phase_plane::period(s, p, e) - target));
    }
  }
  return {worst <= 1e-8, fmt("max |L(M(s)) - s| = %.2e over 2 x 50 samples", worst)};
}

bool orders_ok(const BreatherVerification& v) {
  return v.reduced.pass && v.full.pass && v.curl_curl.pass;
}

std::string orders(const BreatherVerification& v) {
  return fmt("reduced %.3f full %.3f curlcurl %.3f", v.reduced.order, v.full.order, v.curl_curl.order);
}

Outcome end_to_end() {
  bool ok = true;
  std::string detail;
  for (Sign s : kSigns) {
    const auto prof = builtin_profile(Exponent(3), s, {});
    const auto hyp = check_hypotheses(prof, default_radial_grid(prof.delta()));
    const auto v = verify_breather(Breather(prof));
    ok = ok && hyp.all_ok() && orders_ok(v) && v.full.points == 20 && v.full.h.size() == 3;
    detail += to_string(s) + ": hyp " + (hyp.all_ok() ? "ok" : hyp.first_failure(s)) + ", " +
              orders(v) + (s == Sign::Plus ? "; " : "");
  }
  return {ok, detail};
}

Outcome periodicity_regularity() {
  bool ok = true;
  double per = 0.0, origin = 0.0;
  double last = 0.0;
  bool monotone = true;
  for (Sign s : kSigns) {
    const Breather b(builtin_profile(Exponent(3), s, {}));
    for (int i = 1; i <= 10; ++i) {
      const double r = 0.3 * i;
      for (int j = 0; j < 10; ++j) {
        const double t = b.T() * j / 10.0 + 0.123;
        per = std::max(per, std::fabs(b.psi(r, t + b.T()) - b.psi(r, t)));
        origin = std::max(origin, std::fabs(b.psi(0.0, t)));
      }
    }
    // one-sided (psi(0) - 2 psi(h) + psi(2h)) / h^2 under dyadic refinement
    double prev = HUGE_VAL;
    for (int k = 0; k <= 10; ++k) {
      const double h = 0.1 / std::pow(2.0, k);
      double est = 0.0;
      for (int j = 0; j < 8; ++j) {
        const double t = b.T() * j / 8.0;
        est = std::max(est, std::fabs(b.psi(0.0, t) - 2.0 * b.psi(h, t) + b.psi(2.0 * h, t)) / (h * h));
      }
      monotone = monotone && est < prev;
      prev = est;
    }
    last = std::max(last, prev);
  }
  ok = per <= 1e-8 && origin == 0.0 && monotone && last < 1e-3;
  return {ok, fmt("periodicity %.2e, |psi(0,t)| = %.0e, psi_rr(0) FD monotone -> %.2e", per, origin,
                  last) + (monotone ? "" : " (NOT monotone)")};
}

Outcome decay() {
  bool ok = true;
  std::string detail;
  for (Sign s : kSigns) {
    const Breather b(builtin_profile(Exponent(3), s, {}));
    const auto fit = decay_rate(b, linear_grid(4.0, 8.0, 17));
    ok = ok && fit.certifies;
    detail += to_string(s) + fmt(" rate %.3f >= delta %.1f; ", fit.rate, b.profile().delta());
  }
  return {ok, detail};
}

Outcome phase_shifts() {
  const auto r2 = RadialExpr::power(2);
  const std::vector<std::pair<std::string, RadialExpr>> phases{
      {"0.5 exp(-r^2)", RadialExpr::constant(0.5) * RadialExpr::gauss(1.0)},
      {"r^2/(1+r^2)", r2 / (RadialExpr::constant(1.0) + r2)},
      {"1.7 + 0.3 r^4 exp(-r^2/2)", RadialExpr::constant(1.7) +
                                        RadialExpr::constant(0.3) * RadialExpr::power(4) *
                                            RadialExpr::gauss(0.5)}};
  bool ok = true;
  std::string detail;
  for (Sign s : kSigns) {
    const Breather base(builtin_profile(Exponent(3), s, {}));
    for (const auto& [name, a] : phases) {
      const auto b = base.phase_shifted([a](double r) { return a(r); });
      const auto v = verify_breather(b);
      ok = ok && orders_ok(v);
      if (!orders_ok(v)) detail += to_string(s) + " " + name + " fails (" + orders(v) + "); ";
    }
  }
  if (ok) detail = "3 phases x 2 signs, all residual orders in [1.8, 2.2]";
  return {ok, detail};
}

Outcome complex_breather_check() {
  bool ok = true;
  double worst = 0.0;
  std::string orders_txt;
  for (Sign s : kSigns) {
    const auto prof = builtin_profile(Exponent(3), s, {});
    const double om = kTwoPi / prof.T();
    for (int i = 1; i <= 100; ++i) {
      const double r = 0.05 * i;
      const double phi = complex_breather(prof, r);
      const double scale = om * om * prof.s(r).v + prof.q(r).v +
                           prof.V(r).v * abs_pow(phi, prof.p() - 1.0);
      worst = std::max(worst, std::fabs(complex_breather_identity(prof, r)) / scale);
    }
    const auto rep = verify_monochromatic(prof);
    ok = ok && rep.pass;
    orders_txt += fmt(" %.3f", rep.order);
  }
  ok = ok && worst <= 1e-13;
  return {ok, fmt("identity rel residual %.2e at 2 x 100 radii; PDE order", worst) + orders_txt};
}

Outcome amplitude_bounds() {
  bool ok = true;
  std::size_t n = 0;
  for (double pv : kExponents) {
    const Exponent p(pv);
    for (double e : expansions::geometric_defects(1e-10, 1e3, 60)) {
      ok = ok && phase_plane::amplitude(Sign::Plus, p, e) <= std::sqrt(e);
      ++n;
    }
    const double es = phase_plane::separatrix_energy(p);
    std::vector<double> em;
    for (double e : expansions::geometric_defects(1e-10, 0.9 * es, 40)) em.push_back(e);
    for (int k = 2; k <= 12; ++k) em.push_back(es * (1.0 - std::pow(10.0, -k)));
    for (double e : em) {
      const double nm = phase_plane::amplitude(Sign::Minus, p, e);
      ok = ok && nm <= std::sqrt((p + 1.0) * e / (p - 1.0)) && nm < 1.0;
      ++n;
    }
  }
  return {ok, fmt("%.0f energies, 4 exponents, both signs", double(n))};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget;  // seconds; <= 0 when none is stated
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"period endpoint L(0) = 2pi", 1.0, period_endpoint},
      {"analytic alpha anchor", 1.0, alpha_anchor},
      {"expansion fits", 10.0, expansion_fits},
      {"dual period oracles", 30.0, dual_oracles},
      {"period map roundtrip", 10.0, roundtrip},
      {"end-to-end constructions", 300.0, end_to_end},
      {"periodicity and regularity", 0.0, periodicity_regularity},
      {"decay", 0.0, decay},
      {"phase-shift continuum", 0.0, phase_shifts},
      {"complex breather", 0.0, complex_breather_check},
      {"amplitude bounds", 0.0, amplitude_bounds},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_budget = c.budget <= 0.0 || sec < c.budget;
    const bool pass = o.pass && in_budget;
    failures += pass ? 0 : 1;
    std::printf("%s %2zu  %-28s %s [%.2f s%s]\n", pass ? "PASS" : "FAIL", i + 1, c.name,
                o.detail.c_str(), sec, in_budget ? "" : ", over budget");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
