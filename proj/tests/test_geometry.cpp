#include <cmath>

#include <gtest/gtest.h>

#include "ringmod/geometry.hpp"
#include "ringmod/grid.hpp"

using namespace ringmod;

TEST(Domain, Validation) {
  EXPECT_THROW(domain_spec(disk{0.0, -1.0}), rejection);
  EXPECT_THROW(domain_spec(annulus{2.0, 1.0}), rejection);
  EXPECT_THROW(domain_spec(grotzsch{0.5}), rejection);
  EXPECT_THROW(domain_spec(polygon{{{0, 0}, {1, 1}, {1, 0}, {0, 1}}}), rejection);  // bow tie
}

TEST(Domain, Membership) {
  const domain_spec g(grotzsch{2.0});
  EXPECT_TRUE(g.contains({1.5, 0}));
  EXPECT_FALSE(g.contains({3.0, 0}));
  EXPECT_FALSE(g.contains({0.5, 0}));
  EXPECT_TRUE(g.contains({3.0, 0.1}));
  const domain_spec t(teichmuller{1.0, 1.0});
  EXPECT_FALSE(t.contains({-0.5, 0}));
  EXPECT_TRUE(t.contains({0.5, 0}));
  const auto c = complement(domain_spec(disk{0.0, 2.0}));
  EXPECT_TRUE(c.contains({3, 0}));
  EXPECT_FALSE(c.contains({1, 0}));
}

TEST(Ring, NotARing) {
  EXPECT_THROW(ring_domain_spec::named(domain_spec(disk{0.0, 1.0})), rejection);
  EXPECT_THROW(ring_domain_spec::between(domain_spec(disk{0.0, 1.0}), domain_spec(disk{0.0, 2.0})), rejection);
}

TEST(Curves, LogLengthOfCircle) {
  EXPECT_NEAR(logarithmic_length(curve_samples::circle(0.0, 2.0, 10000)), 2 * pi, 1e-6);
  EXPECT_THROW(logarithmic_length(curve_samples({{-1, 0}, {1, 0}}, false)), rejection);
}

TEST(Curves, RadiiOfEllipseImage) {
  std::vector<point> p;
  for (int k = 0; k < 4096; ++k) {
    const point z = std::polar(10.0, 2 * pi * k / 4096);
    p.push_back(z + std::conj(z) / std::abs(z));
  }
  const auto r = curve_radii(curve_samples(p, true));
  EXPECT_NEAR(r.r1, 9.0, 1e-9);
  EXPECT_NEAR(r.r2, 11.0, 1e-9);
  EXPECT_NEAR(r.omega, std::log(11.0 / 9.0), 1e-9);
  const auto s = curve_radii(curve_samples(p, true).scaled(3.0));
  EXPECT_NEAR(s.r1, 27.0, 1e-8);
  EXPECT_NEAR(s.omega, r.omega, 1e-12);
}

TEST(LogArea, Annulus) {
  const auto a = ring_domain_spec::named(domain_spec(annulus{1.0, 3.0}));
  EXPECT_NEAR(logarithmic_area(a), 2 * pi * std::log(3.0), 1e-9);
}

TEST(LogArea, ScaleAndRotationInvariant) {
  const std::vector<point> outer{{-4, -4}, {4, -4}, {4, 4}, {-4, 4}}, inner{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  const auto base = logarithmic_area(ring_domain_spec::between(domain_spec(polygon{outer}), domain_spec(polygon{inner})));
  const point c = std::polar(2.5, 0.3);
  std::vector<point> o2, i2;
  for (auto z : outer) o2.push_back(c * z);
  for (auto z : inner) i2.push_back(c * z);
  EXPECT_NEAR(logarithmic_area(ring_domain_spec::between(domain_spec(polygon{o2}), domain_spec(polygon{i2}))), base, 1e-8);
}

TEST(LogArea, ReducedDisk) {
  // off-centre disk: the reduced log area of {|z - c| < a} is 2 pi log a for c = 0
  EXPECT_NEAR(reduced_logarithmic_area(domain_spec(disk{0.0, 2.0})), 2 * pi * std::log(2.0), 1e-9);
  EXPECT_THROW(reduced_logarithmic_area(domain_spec(disk{3.0, 1.0})), rejection);
}

TEST(Quad, MarksAndConjugate) {
  const auto q = quadrilateral_spec::rectangle(2, 1);
  EXPECT_EQ(q.side(0).size(), 2u);
  EXPECT_EQ(q.conjugate().marks()[0], 1);
  EXPECT_THROW(quadrilateral_spec({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {0, 2, 1, 3}), rejection);
  EXPECT_NEAR(q.area(), 2.0, 1e-15);
}

TEST(Raster, RefinementKeepsInterior) {
  const auto ring = ring_domain_spec::named(domain_spec(annulus{1.0, 2.0}));
  const auto g1 = rasterize(ring, 32), g2 = rasterize(ring, 64);
  EXPECT_GT(g2.interior_count(), 3 * g1.interior_count());
}
