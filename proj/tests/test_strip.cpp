#include <cmath>

#include <gtest/gtest.h>

#include "ringmod/strip.hpp"

using namespace ringmod;

TEST(Theta, StraightStrip) {
  const auto s = strip_spec::straight(2.0, 0.0, 10.0);
  const auto p = theta_profile(s, {0.5, 3.3, 9.1});
  for (double t : p.theta) EXPECT_NEAR(t, 2.0, 1e-12);
}

TEST(Theta, Sector) {
  const double beta = pi / 6;
  const auto s = strip_spec::sector(beta, 40.0);
  const auto p = theta_profile(s, {1.5, 7.0, 30.0});
  for (std::size_t i = 0; i < p.x.size(); ++i) EXPECT_NEAR(p.theta[i], 2 * p.x[i] * std::tan(beta), 1e-10);
}

TEST(Theta, CombDipsAtTooth) {
  const auto s = strip_spec::comb(1.0, 0.0, 10.0, 4.0, 6.0, 0.5);
  const auto p = theta_profile(s, {2.0, 5.0, 8.0});
  EXPECT_NEAR(p.theta[0], 1.0, 1e-12);
  EXPECT_NEAR(p.theta[1], 0.5, 1e-12);
  EXPECT_NEAR(p.theta[2], 1.0, 1e-12);
}

TEST(Theta, InverseIntegral) {
  const auto I = integrate_inverse_theta(strip_spec::sector(pi / 6, 40.0), 1.0, 20.0);
  EXPECT_NEAR(I.value, std::log(20.0) / (2 * std::tan(pi / 6)), I.error);
  EXPECT_LT(I.error, 2e-3);
}

TEST(Strip, Validation) {
  EXPECT_THROW(strip_spec({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {1, 0.5}, {0, 0.5}), rejection);
  EXPECT_THROW(strip_spec::sector(2.0, 10.0), rejection);
  auto s = strip_spec({{0, 0}, {10, 0}, {10, 1}, {0, 1}}, {0, 0.5}, {10, 0.5});
  EXPECT_THROW(s.with_map(expr::parse("2*z", 'z'), 1.0), rejection);
}

TEST(Ahlfors, StraightMarginFour) {
  const auto r = ahlfors_check(strip_spec::straight(1.0, 0.0, 10.0), 1.0, 6.0);
  EXPECT_NEAR(parse_number(r.value_of("margin")), 4.0, 1e-9);
  EXPECT_EQ(r.value_of("verdict"), "holds");
}

TEST(Ahlfors, SectorExactMap) {
  const auto r = ahlfors_check(strip_spec::sector(pi / 6, 40.0), 1.0, 20.0);
  EXPECT_EQ(r.value_of("verdict"), "holds");
  EXPECT_GT(parse_number(r.value_of("margin")), 0.0);
}

TEST(Refined, Constant) {
  EXPECT_NEAR(refined_constant(2.0), 0.887, 1e-3);
  for (double I = 2.01; I < 12; I += 0.37) EXPECT_LE(refined_constant(I), 4.0);
  EXPECT_THROW(refined_constant(0.5), rejection);
}

TEST(Refined, SectorTighter) {
  const auto r = refined_distortion_check(strip_spec::sector(pi / 6, 40.0), 1.0, 20.0);
  EXPECT_EQ(r.value_of("never_weaker"), "yes");
  EXPECT_LT(parse_number(r.value_of("margin")), parse_number(r.value_of("coarse_margin")));
  EXPECT_EQ(r.violations, 0);
}

TEST(ThetaBound, Comb) {
  strip_options o;
  o.resolution = 128;
  const auto r = theta_module_bound(strip_spec::comb(1.0, 0.0, 10.0, 4.0, 6.0, 0.5), 1.0, 9.0, o);
  EXPECT_EQ(r.value_of("verdict"), "holds");
  EXPECT_GT(parse_number(r.value_of("margin")), 0.0);
}

TEST(Ahlfors, CombGeometric) {
  strip_options o;
  o.resolution = 128;
  const auto r = ahlfors_check(strip_spec::comb(1.0, 0.0, 10.0, 4.0, 6.0, 0.5), 0.5, 9.5, o);
  EXPECT_EQ(r.value_of("path"), "window potential");
  EXPECT_EQ(r.value_of("verdict"), "holds");
}
