#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ringmod/elliptic.hpp"

using namespace ringmod;

// reference values from an arbitrary-precision library
constexpr double K_half = 1.8540746773013719184;
constexpr double log_phi_ref[][2] = {{1.5, 1.6528867488243406}, {2.0, 2.0094593770052852},
                                     {4.0, 2.7565517108745847}, {8.0, 3.4618046262973780},
                                     {1000.0, 8.2940493901019261}};
constexpr double log_psi_ref[][2] = {{0.5, 2.6847562088766241}, {1.0, pi}, {3.0, 4.0189187540105703},
                                     {10.0, 5.1232546863265745}};

TEST(Agm, Symmetric) {
  EXPECT_DOUBLE_EQ(agm(1.0, 1.0), 1.0);
  EXPECT_NEAR(agm(1.0, std::sqrt(2.0)), agm(std::sqrt(2.0), 1.0), 1e-15);
  const auto it = agm_iterate(1.0, 1e-6);
  EXPECT_TRUE(it.converged);
  EXPECT_LT(it.iterations, 12);
}

TEST(Agm, RejectsNonPositive) {
  EXPECT_THROW(agm(0.0, 1.0), rejection);
  EXPECT_THROW(agm(-1.0, 1.0), rejection);
}

TEST(EllipticK, PowerSeriesValue) {
  EXPECT_NEAR(ellip_k(1.0 / std::sqrt(2.0)), K_half, 1e-14);
  EXPECT_NEAR(ellip_k(0.0), pi / 2, 1e-15);
  EXPECT_THROW(ellip_k(1.0), rejection);
}

TEST(Mu, SymmetricPoint) {
  EXPECT_NEAR(mu(1.0 / std::sqrt(2.0)), pi / 2, 1e-15);
  EXPECT_NEAR(mu(0.5), 2.0094593770052852, 1e-13);
  EXPECT_THROW(mu(0.0), rejection);
  EXPECT_THROW(mu(1.0), rejection);
}

TEST(Mu, Functional) {
  // mu(r) mu(r') = pi^2 / 4
  for (double r : {0.01, 0.2, 0.5, 0.9, 0.999}) {
    const double rp = std::sqrt(1 - r * r);
    EXPECT_NEAR(mu(r) * mu(rp), pi * pi / 4, 1e-12) << r;
  }
}

TEST(Phi, Reference) {
  for (auto [P, v] : log_phi_ref) EXPECT_NEAR(log_grotzsch_phi(P), v, 1e-12 * v) << P;
  EXPECT_NEAR(grotzsch_phi(std::sqrt(2.0)) / std::exp(pi / 2), 1.0, 1e-13);
  EXPECT_THROW(grotzsch_phi(1.0), rejection);
}

TEST(Psi, Reference) {
  for (auto [P, v] : log_psi_ref) EXPECT_NEAR(log_teich_psi(P), v, 1e-12 * v) << P;
  EXPECT_NEAR(teich_psi(1.0) / std::exp(pi), 1.0, 1e-13);
  EXPECT_THROW(teich_psi(0.0), rejection);
}

TEST(PhiPsi, Relations) {
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> u(-2.0, 4.0);
  for (int i = 0; i < 100; ++i) {
    const double P = std::pow(10.0, u(g));
    EXPECT_NEAR(log_teich_psi(P), 2 * log_grotzsch_phi(std::sqrt(P + 1)), 1e-12 * log_teich_psi(P));
    const double Q = 1.0 + std::pow(10.0, u(g));
    EXPECT_NEAR(log_teich_psi(Q * Q - 1), 2 * log_grotzsch_phi(Q), 1e-11 * log_grotzsch_phi(Q));
  }
}

TEST(Phi, Asymptotics) {
  double prev = 0;
  for (int k = 0; k < 50; ++k) {
    const double P = std::pow(10.0, 0.01 + 3.0 * k / 49);
    const double q = grotzsch_phi(P) / (4 * P);
    EXPECT_GT(q, prev) << P;
    EXPECT_LT(q, 1.0);
    prev = q;
    EXPECT_LT(teich_psi(P), 16 * (P + 1));
  }
  EXPECT_NEAR(grotzsch_phi(1000) / 4000, 0.99999974999993, 1e-12);
}
