#include <cmath>

#include <gtest/gtest.h>

#include "ringmod/modulsatz.hpp"

using namespace ringmod;

TEST(Special, ConcentricDisks) {
  const auto r = verify_special_modulsatz(domain_spec(disk{0.0, 2.0}), complement(domain_spec(disk{0.0, 2.0})));
  EXPECT_NEAR(parse_number(r.value_of("delta")), 0.0, 1e-9);
  EXPECT_NEAR(parse_number(r.value_of("epsilon")), 0.0, 1e-9);
}

TEST(Special, OffCentre) {
  const auto r = verify_special_modulsatz(domain_spec(disk{0.2, 1.0}), complement(domain_spec(disk{0.0, 1.5})));
  EXPECT_NEAR(parse_number(r.value_of("delta")), 0.4462871026284195, 2e-2);
  EXPECT_EQ(r.violations, 0);
}

TEST(Special, Overlap) {
  EXPECT_THROW(verify_special_modulsatz(domain_spec(disk{0.0, 2.0}), complement(domain_spec(disk{0.0, 1.0}))), rejection);
}

TEST(Ring, SplitAnnulus) {
  const auto A = [](double r, double R) { return ring_domain_spec::named(domain_spec(annulus{r, R})); };
  const auto r = verify_modulsatz(A(1, std::exp(3.0)), A(1, std::exp(1.0)), A(std::exp(2.0), std::exp(3.0)));
  EXPECT_NEAR(parse_number(r.value_of("delta")), 1.0, 1e-9);
  EXPECT_NEAR(parse_number(r.value_of("epsilon")), 0.0, 1e-9);
  EXPECT_THROW(verify_modulsatz(A(1, 10), A(1, 4), A(2, 10)), rejection);
}

TEST(Ring, SquareMiddle) {
  // a square curve between two round subrings
  const std::vector<point> sq{{-3, -3}, {3, -3}, {3, 3}, {-3, 3}};
  const auto ring = ring_domain_spec::named(domain_spec(annulus{1, 20}));
  const auto g1 = ring_domain_spec::between(domain_spec(polygon{sq}), domain_spec(disk{0.0, 1.0}));
  const auto g2 = ring_domain_spec::named(domain_spec(annulus{5, 20}));
  const auto r = verify_modulsatz(ring, g1, g2);
  EXPECT_GT(parse_number(r.value_of("delta")), 0.0);
  EXPECT_EQ(r.violations, 0);
}

TEST(Bump, Ladder) {
  const auto r = bump_family_probe({0.05, 0.1, 0.2});
  EXPECT_EQ(r.value_of("delta_nonnegative"), "yes");
  EXPECT_EQ(r.value_of("epsilon_follows_delta"), "yes");
  EXPECT_EQ(r.value_of("ratio_within_decade"), "yes");
  EXPECT_NEAR(r.rows[1][4], std::log(1.1 / 0.9), 1e-4);
  EXPECT_THROW(bump_family_probe({0.6}), rejection);
}

TEST(Enclosing, Triangle) {
  const auto k = min_enclosing_circle({{0, 0}, {2, 0}, {1, 0.1}});
  EXPECT_NEAR(k.r, 1.0, 1e-12);
  EXPECT_NEAR(std::abs(k.c - point(1, 0)), 0.0, 1e-12);
}

TEST(RegionB, Sampler) {
  const auto r = region_b_sampler(20, 11);
  EXPECT_EQ(r.violations, 0);
}
