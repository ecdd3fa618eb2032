#include <cstdlib>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "curlwave/io.hpp"

using namespace curlwave;

namespace {

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(Csv, SeventeenDigitsRoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, kTwoPi, -2.5e-300, 6.02214076e23}) {
    EXPECT_EQ(std::strtod(io::format_double(x).c_str(), nullptr), x);
  }
  EXPECT_EQ(io::format_double(0.1), "0.10000000000000001");
}

TEST(Csv, HeaderAndWidth) {
  std::ostringstream os;
  io::CsvWriter w(os, {"a", "b"});
  w.row({1.0, 2.0});
  EXPECT_THROW(w.row({1.0}), ConfigError);
  EXPECT_EQ(os.str(), "a,b\n1,2\n");
}

TEST(Csv, RadialSliceAndField) {
  const Breather b(builtin_profile(Exponent(3), Sign::Plus, {}));
  std::ostringstream rs;
  EXPECT_EQ(io::write_radial_slice(rs, b, {0.0, 1.0}, {0.0, 0.5, 1.0}), 6u);
  auto l = lines(rs.str());
  ASSERT_EQ(l.size(), 7u);
  EXPECT_EQ(l[0], "r,t,psi");
  EXPECT_EQ(l[1], "0,0,0");
  const auto last = l.back().substr(l.back().rfind(',') + 1);
  EXPECT_EQ(std::strtod(last.c_str(), nullptr), b.psi(1.0, 1.0));

  std::ostringstream fs;
  io::write_field(fs, b, {{0.6, 0.0, 0.8}}, {0.25});
  l = lines(fs.str());
  ASSERT_EQ(l.size(), 2u);
  EXPECT_EQ(l[0], "x1,x2,x3,t,U1,U2,U3");
  const Vec3 u = b.U({0.6, 0.0, 0.8}, 0.25);
  EXPECT_NE(l[1].find(io::format_double(u[2])), std::string::npos);
}

TEST(Json, StableKeyOrder) {
  const auto prof = builtin_profile(Exponent(3), Sign::Minus, {});
  const auto h = check_hypotheses(prof, default_radial_grid(prof.delta()));
  const auto j = io::to_json(h, Sign::Minus);
  EXPECT_EQ(j.begin().key(), "sign");
  EXPECT_EQ(j["first_failure"], "");
  EXPECT_TRUE(j["all_ok"].get<bool>());
  EXPECT_EQ(j.dump(2), io::to_json(h, Sign::Minus).dump(2));

  ResidualReport r;
  r.name = "x";
  r.h = {0.1, 0.05};
  r.max_norm = {4e-2, 1e-2};
  const auto jr = io::to_json(r);
  std::vector<std::string> keys;
  for (auto it = jr.begin(); it != jr.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"name", "points", "h", "k", "max_norm", "l2_norm",
                                            "order", "order_window", "pass"}));
}

TEST(Json, ExpansionAndDecay) {
  const auto fit = expansions::validate_expansion(Sign::Plus, Exponent(3),
                                                  expansions::default_s_grid(Sign::Plus, 5));
  const auto j = io::to_json(fit);
  EXPECT_NEAR(j["alpha"].get<double>(), 4.0 / (3.0 * std::numbers::pi), 1e-9);
  const auto d = io::to_json(DecayFit{1.5, 10.0, 20.0, 5, true}, 1.0);
  EXPECT_EQ(d["points"], 5);
  EXPECT_TRUE(d["certifies"].get<bool>());
}
