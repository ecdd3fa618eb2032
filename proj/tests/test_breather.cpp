#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "curlwave/breather.hpp"

using namespace curlwave;

namespace {

constexpr double kPi = std::numbers::pi;

Breather make(Sign s, double p = 3.0) {
  return Breather(builtin_profile(Exponent(p), s, BuiltinParams{1.0, 3, 1.0}));
}

double eps_closed(double r) {
  const double r6 = std::pow(r, 6);
  return r6 * std::exp(-r * r) / (1.0 + r6);
}

}  // namespace

TEST(SigmaTau, BuiltinNormalisationAndTrivialRatios) {
  const auto prof = builtin_profile(Exponent(3), Sign::Plus, {});
  const auto [s0, t0] = sigma_tau(prof, 0.0);
  EXPECT_DOUBLE_EQ(s0, 1.0);
  EXPECT_DOUBLE_EQ(t0, 1.0);
  const auto q = RadialExpr::constant(2.0) + RadialExpr::power(2);
  const CoefficientProfile same(Exponent(3), Sign::Plus, q, q, q, 1.0);
  const auto [s1, t1] = sigma_tau(same, 1.3);
  EXPECT_DOUBLE_EQ(s1, 1.0);
  EXPECT_DOUBLE_EQ(t1, 1.0);
}

TEST(COfR, OriginAndLeadingOrder) {
  for (Sign s : {Sign::Plus, Sign::Minus}) {
    const auto b = make(s);
    EXPECT_EQ(b.c(0.0), 0.0);
    // c^2 = M(2 pi -+ eps) ~ alpha eps with alpha = 4/(3 pi)
    const double r = 0.2;
    EXPECT_NEAR(b.c(r) / std::sqrt(4.0 / (3.0 * kPi) * eps_closed(r)), 1.0, 1e-3) << to_string(s);
    // L(c^2) = g(r)
    EXPECT_NEAR(phase_plane::period(s, Exponent(3), b.c(0.7) * b.c(0.7)),
                b.profile().g(0.7), 1e-10);
  }
}

TEST(COfR, WrongSideNamesHypothesis) {
  const Breather b(builtin_profile(Exponent(3), Sign::Minus, {}).with_sign(Sign::Plus));
  try {
    b.c(1.0);
    FAIL() << "expected HypothesisError";
  } catch (const HypothesisError& e) {
    EXPECT_EQ(e.hypothesis(), "H1");
  }
}

TEST(COfR, GenericProfileCutsOffNearOrigin) {
  const auto exact = builtin_profile(Exponent(3), Sign::Plus, {});
  const CoefficientProfile generic(Exponent(3), Sign::Plus, exact.s_expr(), exact.q_expr(),
                                   exact.V_expr(), 1.0);
  const Breather b(generic);
  EXPECT_EQ(b.c(1e-3), 0.0);  // eps ~ 1e-18, below the 1e-13 resolution
  EXPECT_NEAR(b.c(1.0), make(Sign::Plus).c(1.0), 1e-12);
}

TEST(Psi, ZeroAtOriginAndTPeriodic) {
  for (Sign s : {Sign::Plus, Sign::Minus}) {
    const auto b = make(s);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const double r = 0.3 + 0.35 * i;
      for (int j = 0; j < 10; ++j) {
        const double t = b.T() * j / 10.0;
        worst = std::max(worst, std::fabs(b.psi(r, t + b.T()) - b.psi(r, t)));
      }
      EXPECT_EQ(b.psi(0.0, 0.1 * i), 0.0);
    }
    EXPECT_LE(worst, 1e-8) << to_string(s);
  }
}

TEST(Psi, AmplitudeEnvelope) {
  for (Sign s : {Sign::Plus, Sign::Minus}) {
    const auto b = make(s);
    for (int i = 1; i <= 10; ++i) {
      const double r = 0.25 * i;
      EXPECT_LE(b.psi_max(r), b.envelope(r) * (1.0 + 1e-9)) << to_string(s) << " r=" << r;
      EXPECT_GT(b.psi_max(r), 0.0);
    }
  }
}

TEST(Psi, TimeDerivativeAgreesWithDifference) {
  const auto b = make(Sign::Minus);
  const double r = 1.1, t = 2.3, k = 1e-5;
  const double fd = (b.psi(r, t + k) - b.psi(r, t - k)) / (2 * k);
  EXPECT_NEAR(b.psi_and_dt(r, t).second, fd, 1e-8);
  EXPECT_EQ(b.psi_and_dt(r, t).first, b.psi(r, t));
}

TEST(Psi, SecondRadialDerivativeVanishesAtOrigin) {
  const auto b = make(Sign::Plus);
  const double t = 1.3;
  double prev = HUGE_VAL;
  for (double h = 0.1; h > 0.9e-4; h *= 0.5) {
    const double d2 = std::fabs(b.psi(2 * h, t) - 2 * b.psi(h, t) + b.psi(0.0, t)) / (h * h);
    EXPECT_LT(d2, prev) << h;
    prev = d2;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(Field, AlignmentAndOrigin) {
  const auto b = make(Sign::Plus);
  const Vec3 zero = b.U({0.0, 0.0, 0.0}, 1.0);
  EXPECT_EQ(zero, (Vec3{0.0, 0.0, 0.0}));
  const Vec3 axis = b.U({0.0, 0.0, 1.2}, 0.7);
  EXPECT_EQ(axis[0], 0.0);
  EXPECT_EQ(axis[1], 0.0);
  EXPECT_NEAR(axis[2], b.psi(1.2, 0.7), 1e-15);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const Vec3 x{n(rng), n(rng), n(rng)};
    const Vec3 u = field_U(b, x, 0.4 * i);
    const double r = std::hypot(x[0], x[1], x[2]);
    EXPECT_NEAR(std::hypot(u[0], u[1], u[2]), std::fabs(b.psi(r, 0.4 * i)), 1e-15);
    // parallel to x
    EXPECT_NEAR(u[0] * x[1] - u[1] * x[0], 0.0, 1e-15);
  }
}

TEST(PhaseShift, ZeroAndFullPeriod) {
  const auto b = make(Sign::Plus);
  const auto same = b.phase_shifted([](double) { return 0.0; });
  const auto full = b.phase_shifted([T = b.T()](double) { return T; });
  const auto gauss = b.phase_shifted([T = b.T()](double r) { return 0.25 * T * std::exp(-r * r); });
  for (double r : {0.5, 1.0, 2.0}) {
    for (double t : {0.0, 1.7, 4.0}) {
      EXPECT_EQ(same.psi(r, t), b.psi(r, t));
      EXPECT_NEAR(full.psi(r, t), b.psi(r, t), 1e-8);
      EXPECT_NEAR(gauss.psi(r, t), b.psi(r, t + 0.25 * b.T() * std::exp(-r * r)), 1e-15);
    }
  }
}

TEST(PhaseShift, CurveThroughTurningPoints) {
  // starting every orbit at its turning point (N, 0) takes b(c) = L(c^2)/4,
  // so a(r) = L/(4 sigma) = T/4
  const auto b = make(Sign::Minus);
  const auto shifted = b.phase_from_curve(
      [](double c) { return phase_plane::period(Sign::Minus, Exponent(3), c * c) / 4.0; });
  for (double r : {0.4, 1.3}) {
    EXPECT_NEAR(shifted.phase(r), b.T() / 4.0, 1e-9);
    EXPECT_NEAR(shifted.psi(r, 0.0), b.psi_max(r, 4), 1e-9);
  }
}

TEST(Decay, BuiltinCertifiesDelta) {
  for (Sign s : {Sign::Plus, Sign::Minus}) {
    const auto b = make(s);
    const auto fit = decay_rate(b, linear_grid(4.0, 8.0, 17));
    EXPECT_TRUE(fit.certifies) << to_string(s);
    EXPECT_GT(fit.rate, 1.0);
    // Gaussian tail: the rate grows with the window start
    EXPECT_GT(decay_rate(b, linear_grid(6.0, 8.0, 9)).rate, fit.rate);
  }
}

TEST(Decay, ZeroBreatherHasNoFit) {
  const auto one = RadialExpr::constant(1.0);
  const Breather zero(CoefficientProfile(Exponent(3), Sign::Plus, one, one, one, 1.0));
  EXPECT_EQ(zero.psi(1.0, 0.3), 0.0);
  EXPECT_THROW(decay_rate(zero, linear_grid(4.0, 8.0, 9)), NumericalError);
}

TEST(Complex, AlgebraicIdentityAndOrigin) {
  for (Sign s : {Sign::Plus, Sign::Minus}) {
    const auto prof = builtin_profile(Exponent(3), s, {});
    EXPECT_EQ(complex_breather(prof, 0.0), 0.0);
    for (int i = 1; i <= 100; ++i) {
      const double r = 0.05 * i;
      EXPECT_LE(std::fabs(complex_breather_identity(prof, r)), 1e-13 * prof.q(r).v);
    }
    // p = 3: phi^2 = +-((2 pi/g)^2 - 1) q with g = 2 pi -+ eps and q = (g / 2 pi)^2
    const double g = prof.g(1.0);
    const double expect = sign_factor(s) * (1.0 - std::pow(g / (2 * kPi), 2));
    EXPECT_NEAR(std::pow(complex_breather(prof, 1.0), 2), expect, 1e-15);
  }
  EXPECT_THROW(complex_breather(builtin_profile(Exponent(3), Sign::Minus, {}).with_sign(Sign::Plus), 1.0),
               HypothesisError);
}
