#include <cmath>

#include <gtest/gtest.h>

#include "ringmod/elliptic.hpp"
#include "ringmod/modsolver.hpp"

using namespace ringmod;

namespace {
ring_domain_spec named(domain_spec d) { return ring_domain_spec::named(std::move(d)); }
}  // namespace

TEST(RingModule, RoundAnnulus) {
  const auto r = ring_modulus(named(domain_spec(annulus{0.5, 3.0})), 64);
  EXPECT_NEAR(r.value, std::log(6.0), 1e-9);
  EXPECT_LE(r.error_estimate, 1e-6);
}

TEST(RingModule, OffCentreDiskPair) {
  // two-circle ring: acosh((R^2 + r^2 - d^2) / (2 R r))
  const auto ring = ring_domain_spec::between(domain_spec(disk{0.0, 2.0}), domain_spec(disk{0.5, 0.5}));
  const double alt = std::acosh(2.0);
  const auto m = ring_modulus(ring, 128);
  EXPECT_NEAR(m.value, alt, 5e-3);
}

TEST(RingModule, GrotzschAgainstElliptic) {
  const auto m = ring_modulus(named(domain_spec(grotzsch{2.0})), 128);
  EXPECT_NEAR(m.value, mu(0.5), 1e-2);
  EXPECT_LE(std::abs(m.value - mu(0.5)), std::max(1e-2, 3 * m.error_estimate));
}

TEST(RingModule, TeichmullerSymmetric) {
  const auto m = ring_modulus(named(domain_spec(teichmuller{1.0, 1.0})), 128);
  EXPECT_NEAR(m.value, pi, 2e-2);
}

TEST(RingModule, ScaleInvariance) {
  const std::vector<point> o{{-4, -4}, {4, -4}, {4, 4}, {-4, 4}}, i{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  std::vector<point> o3, i3;
  for (auto z : o) o3.push_back(3.0 * z);
  for (auto z : i) i3.push_back(3.0 * z);
  const auto a = ring_modulus(ring_domain_spec::between(domain_spec(polygon{o}), domain_spec(polygon{i})), 64);
  const auto b = ring_modulus(ring_domain_spec::between(domain_spec(polygon{o3}), domain_spec(polygon{i3})), 64);
  EXPECT_NEAR(a.value, b.value, 1e-6);
  // squeezed between the annuli sqrt2 < |z| < 4 and 1 < |z| < 4 sqrt2
  EXPECT_GT(a.value, std::log(2 * std::sqrt(2.0)));
  EXPECT_LT(a.value, std::log(4 * std::sqrt(2.0)));
}

TEST(QuadModule, Rectangle) {
  const auto q = quadrilateral_spec::rectangle(2.0, 1.0);
  EXPECT_NEAR(quad_modulus(q, 64).value, 0.5, 1e-4);
  EXPECT_NEAR(quad_modulus(q.conjugate(), 64).value, 2.0, 1e-3);
}

TEST(QuadModule, ConjugateReciprocal) {
  // L-shaped hexagon, symmetric across y = x: module 1, slow near the re-entrant corner
  const quadrilateral_spec L({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}, {0, 1, 3, 5});
  const auto a = quad_modulus(L, 128), b = quad_modulus(L.conjugate(), 128);
  EXPECT_NEAR(a.value, 1.0, a.error_estimate);
  EXPECT_NEAR(a.value * b.value, 1.0, 2e-2);
  const auto c = quad_modulus(L, 256);
  EXPECT_NEAR(a.value, c.value, 1e-2);
}

TEST(Reduced, OffCentreDisk) {
  const auto r = reduced_modulus(domain_spec(disk{0.5, 1.0}), point(0.0), 128);
  EXPECT_NEAR(r.module.value, std::log(0.75), 1e-2);
}

TEST(Reduced, DiskExteriorAtInfinity) {
  const auto r = reduced_modulus(complement(domain_spec(disk{0.3, 2.0})), std::nullopt, 128);
  EXPECT_NEAR(r.module.value, -std::log(2.0), 1e-2);
}

TEST(Reduced, SlitPlaneKoebe) {
  const auto r = reduced_modulus(domain_spec(plane_minus_slits{{slit{-1.0, -2.0, true}}}), point(0.0), 128);
  EXPECT_NEAR(r.module.value, std::log(4.0), 2e-2);
}

TEST(Reduced, PointOutside) {
  EXPECT_THROW(reduced_modulus(domain_spec(disk{0.0, 1.0}), point(2.0), 64), rejection);
}

TEST(Options, ResolutionRange) {
  EXPECT_THROW(ring_modulus(named(domain_spec(annulus{1, 2})), 4), rejection);
}
