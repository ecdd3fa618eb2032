#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "curlwave/expansions.hpp"

using namespace curlwave;
using namespace curlwave::expansions;

namespace {

constexpr double kPi = std::numbers::pi;

// |F'(0)|, F''(0) and alpha from 40-digit mpmath quadrature of
// int_0^1 kappa(z) / sqrt(1 - z^2) dz and its F'' analogue.
struct ConstantOracle {
  double p;
  double abs_fprime;
  double fsecond;
  double alpha;
};

const ConstantOracle kConstants[] = {
    {1.5, 3.5944207042067766223, 6.2027896478966116888, 0.014625961414415241232},
    {2.0, 4.0, 7.7809724509617246442, 0.140625},
    {3.0, 4.7123889803846898577, 11.191923828413638412, 0.42441318157838756205},
    {5.0, 5.8904862254808623221, 18.960002538266525599, 0.71364964646110844582},
};

}  // namespace

TEST(Constants, CubicAlphaIsFourOverThreePi) {
  const auto plus = compute_constants(Sign::Plus, Exponent(3));
  EXPECT_NEAR(plus.alpha, 4.0 / (3.0 * kPi), 1e-12);
  EXPECT_NEAR(plus.alpha_tilde, 2.0 / (3.0 * kPi), 1e-13);
  const auto minus = compute_constants(Sign::Minus, Exponent(3));
  EXPECT_NEAR(minus.alpha, plus.alpha, 1e-12);
}

TEST(Constants, MatchOracleAcrossExponents) {
  for (const auto& o : kConstants) {
    for (Sign s : {Sign::Plus, Sign::Minus}) {
      const auto k = compute_constants(s, Exponent(o.p));
      EXPECT_NEAR(1.0 / k.alpha_tilde, o.abs_fprime, 1e-11) << o.p;
      EXPECT_NEAR(k.beta_tilde, o.fsecond, 1e-10) << o.p;
      EXPECT_NEAR(k.alpha, o.alpha, 1e-11 * std::max(1.0, o.alpha)) << o.p;
    }
    EXPECT_LE(std::fabs(compute_constants(Sign::Plus, Exponent(o.p)).alpha -
                        compute_constants(Sign::Minus, Exponent(o.p)).alpha),
              1e-9);
  }
}

TEST(Leading, ExponentsAndSigns) {
  const double alpha = 4.0 / (3.0 * kPi);
  const auto plus = m_leading(Sign::Plus, Exponent(3), 2 * kPi - 1e-4);
  EXPECT_NEAR(plus.M / (alpha * 1e-4), 1.0, 1e-9);
  EXPECT_LT(plus.Mprime, 0.0);
  EXPECT_NEAR(plus.Msecond, 0.0, 1e-15);  // factor (3 - p)
  const auto minus = m_leading(Sign::Minus, Exponent(3), 2 * kPi + 1e-4);
  EXPECT_NEAR(minus.Mprime, alpha, 1e-9);
  // sqrtM'' = sqrt(alpha) (2 - p)/(p - 1)^2 d^{(3-2p)/(p-1)} = -sqrt(alpha)/4 d^{-3/2}
  const double d = 1e-2;
  const auto t = m_leading(Sign::Plus, Exponent(3), 2 * kPi - d);
  EXPECT_NEAR(t.sqrtM_second * std::pow(d, 1.5), -std::sqrt(alpha) / 4.0, 1e-9);
  EXPECT_NEAR(t.sqrtM * t.sqrtM, t.M, 1e-15);
}

TEST(Leading, WrongSideRejected) {
  EXPECT_THROW(m_leading(Sign::Plus, Exponent(3), 2 * kPi + 1e-3), DomainError);
  EXPECT_THROW(m_leading(Sign::Minus, Exponent(3), 2 * kPi - 1e-3), DomainError);
  EXPECT_THROW(m_leading(Sign::Minus, Exponent(3), 2 * kPi), DomainError);
}

TEST(Leading, DerivativesConsistentWithValue) {
  // d/ds of the leading M equals the leading M' (and likewise for sqrtM)
  for (Sign sg : {Sign::Plus, Sign::Minus}) {
    for (double p : {1.5, 2.0, 4.0}) {
      const double s0 = sg == Sign::Plus ? 2 * kPi - 1e-2 : 2 * kPi + 1e-2;
      const double h = 1e-6;
      const auto a = m_leading(sg, Exponent(p), s0 + h);
      const auto b = m_leading(sg, Exponent(p), s0 - h);
      const auto c = m_leading(sg, Exponent(p), s0);
      EXPECT_NEAR((a.M - b.M) / (2 * h), c.Mprime, 1e-6 * std::fabs(c.Mprime) + 1e-14);
      EXPECT_NEAR((a.sqrtM - b.sqrtM) / (2 * h), c.sqrtM_prime, 1e-6 * std::fabs(c.sqrtM_prime));
      EXPECT_NEAR((a.Mprime - b.Mprime) / (2 * h), c.Msecond, 1e-5 * std::fabs(c.Msecond) + 1e-10);
      EXPECT_NEAR((a.sqrtM_prime - b.sqrtM_prime) / (2 * h), c.sqrtM_second,
                  1e-5 * std::fabs(c.sqrtM_second) + 1e-10);
    }
  }
}

TEST(Validate, FitsForQuadraticAndCubic) {
  for (Sign sg : {Sign::Plus, Sign::Minus}) {
    for (double p : {2.0, 3.0}) {
      const auto fit = validate_expansion(sg, Exponent(p), default_s_grid(sg));
      EXPECT_TRUE(fit.pass) << to_string(sg) << " p=" << p << " exp=" << fit.exponent
                            << " pref=" << fit.prefactor << " mprime=" << fit.mprime_rel_error;
      EXPECT_NEAR(fit.exponent, 2.0 / (p - 1.0), 0.01 * 2.0 / (p - 1.0));
      EXPECT_NEAR(fit.prefactor / fit.alpha, 1.0, 0.02);
      EXPECT_LE(fit.mprime_rel_error, 0.05);
      EXPECT_NEAR(fit.d_min, 1e-6, 1e-12);
    }
  }
}

TEST(Validate, RejectsDegenerateGrids) {
  EXPECT_THROW(validate_expansion(Sign::Plus, Exponent(3), {6.0, 6.1}), ConfigError);
  EXPECT_THROW(geometric_defects(1e-2, 1e-6, 5), ConfigError);
}
