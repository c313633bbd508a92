#include <cmath>

#include <gtest/gtest.h>

#include "ringmod/qcmap.hpp"

using namespace ringmod;

namespace {
// central differences of the map as a real 2x2 Jacobian
double fd_dilatation(const qc_map& f, point z) {
  const double h = 1e-6;
  const point fx = (f(z + h) - f(z - h)) / (2 * h);
  const point fy = (f(z + point(0, h)) - f(z - point(0, h))) / (2 * h);
  const point a = 0.5 * (fx - point(0, 1) * fy), b = 0.5 * (fx + point(0, 1) * fy);
  return (std::abs(a) + std::abs(b)) / std::abs(std::abs(a) - std::abs(b));
}
}  // namespace

TEST(Dilatation, RadialLogTwist) {
  const auto f = qc_map::parse("radial:g=0;eta=log(r)");
  const double D = std::pow(std::sqrt(1.25) + 0.5, 2);
  for (point z : {point(2, 1), point(-0.3, 0.7), point(50, -20)}) {
    EXPECT_NEAR(dilatation(f, z), D, 1e-9);
    EXPECT_NEAR(fd_dilatation(f, z), D, 1e-6);
  }
}

TEST(Dilatation, Affine) {
  EXPECT_NEAR(dilatation(qc_map::affine(3.0), {0.4, 2}), 3.0, 1e-12);
  EXPECT_NEAR(dilatation(qc_map::identity(), {1, 1}), 1.0, 1e-15);
}

TEST(Dilatation, ComposeMatchesDifferences) {
  const auto f = qc_map::parse("compose(affine:K=2,ellipse:a=0.5)");
  for (point z : {point(2, 1), point(-3, 0.5)}) EXPECT_NEAR(dilatation(f, z), fd_dilatation(f, z), 1e-5);
}

TEST(Parse, RoundTrip) {
  const auto f = qc_map::parse("radial:g=1/(1+r);eta=atan(r)");
  const auto g = qc_map::parse(f.str());
  EXPECT_NEAR(std::abs(f({3, 4}) - g({3, 4})), 0.0, 1e-14);
  EXPECT_THROW(qc_map::parse("bogus:x=1"), rejection);
  EXPECT_THROW(qc_map::affine(0.5), rejection);
}

TEST(Images, EllipseCircle) {
  const auto s = image_circle_stats(qc_map::ellipse(1.0), std::log(10.0));
  EXPECT_NEAR(s.r1, 9.0, 1e-9);
  EXPECT_NEAR(s.r2, 11.0, 1e-9);
  EXPECT_NEAR(s.omega, std::log(11.0 / 9.0), 1e-9);
}

TEST(T3, PowerAttainsUpper) {
  const auto r = verify_t3(qc_map::power(2.0), 1.0, std::exp(1.0));
  EXPECT_NEAR(parse_number(r.value_of("module")), 2.0, 1e-3);
  EXPECT_NEAR(parse_number(r.value_of("upper")), 2.0, 1e-9);
  EXPECT_NEAR(parse_number(r.value_of("lower")), 0.5, 1e-9);
  EXPECT_EQ(r.violations, 0);
}

TEST(T3, EllipseWithinBounds) {
  const auto r = verify_t3(qc_map::ellipse(0.1), 4.0, 40.0);
  EXPECT_EQ(r.violations, 0);
  EXPECT_EQ(r.value_of("verdict"), "bounds hold");
}

TEST(TypeCondition, Verdicts) {
  EXPECT_EQ(type_condition(expr::parse("3", 'r'), type_direction::plane_to_disk).value_of("verdict"), "map excluded");
  EXPECT_EQ(type_condition(expr::parse("log(r)", 'r'), type_direction::plane_to_disk, 4).value_of("verdict"), "map excluded");
  EXPECT_EQ(type_condition(expr::parse("log(r)^2", 'r'), type_direction::plane_to_disk, 4).value_of("verdict"),
            "not excluded");
}

TEST(MainLemma, ConvergentRadial) {
  const auto r = main_lemma_experiment(qc_map::parse("radial:g=1/(1+r);eta=0"), lambda_ladder(1, 12, 12));
  EXPECT_EQ(r.value_of("conclusion"), "shifts converge");
  EXPECT_NEAR(parse_number(r.value_of("alpha")), 0.0, 1e-3);
}

TEST(MainLemma, LinearDrift) {
  const auto r = main_lemma_experiment(qc_map::parse("radial:g=0.1*log(r);eta=0"), lambda_ladder(1, 12, 12));
  EXPECT_EQ(r.value_of("conclusion"), "shifts do not converge");
  EXPECT_NEAR(parse_number(r.value_of("shift_slope")), 0.1, 1e-3);
}

TEST(Twb, LogTwist) {
  const auto r = twb_experiment(qc_map::parse("radial:g=0;eta=log(r)"), lambda_ladder(1, 8, 8));
  EXPECT_EQ(r.value_of("conclusion"), "Main Lemma conclusion holds, TWB conclusion fails");
  EXPECT_GE(parse_number(r.value_of("arg_traverse")), 2 * pi);
}

TEST(Twb, BoundedTwist) {
  const auto r = twb_experiment(qc_map::parse("radial:g=0;eta=atan(r)"), lambda_ladder(1, 12, 12));
  EXPECT_NEAR(parse_number(r.value_of("arg_limit")), pi / 2, 1e-3);
}

TEST(Ladder, Rejects) {
  EXPECT_THROW(lambda_ladder(3, 1, 4), rejection);
}
