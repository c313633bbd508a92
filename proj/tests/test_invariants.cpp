#include <sstream>

#include <gtest/gtest.h>

#include "ringmod/invariants.hpp"

using namespace ringmod;

namespace {
void expect_clean(const report& r) {
  EXPECT_EQ(r.violations, 0) << r.name << " worst " << r.value_of("worst_margin");
  EXPECT_EQ(r.value_of("violations"), "0");
}
}  // namespace

TEST(Suites, Monotonicity) { expect_clean(check_monotonicity(20, 1)); }
TEST(Suites, Superadditivity) { expect_clean(check_superadditivity(20, 2)); }
TEST(Suites, LogArea) { expect_clean(check_log_area(30, 3)); }
TEST(Suites, ReducedSum) { expect_clean(check_reduced_sum(20, 4)); }
TEST(Suites, QuadInequalities) { expect_clean(check_quad_inequalities(40, 5)); }
TEST(Suites, GrotzschExtremal) { expect_clean(check_grotzsch_extremal(12, 6)); }
TEST(Suites, TeichExtremal) { expect_clean(check_teich_extremal(8, 7)); }
TEST(Suites, SlitAnnulusExtremal) { expect_clean(check_slit_annulus_extremal(8, 8)); }

TEST(Suites, CircleContainment) {
  const auto r = check_circle_containment(10, 9);
  expect_clean(r);
  EXPECT_EQ(r.value_of("teichmuller_borderline_module"), format_number(pi));
}

TEST(Suites, SeedDeterminism) {
  suite_options a, b;
  b.jobs = 3;
  std::ostringstream x, y;
  write_csv(x, check_monotonicity(9, 42, a));
  write_csv(y, check_monotonicity(9, 42, b));
  EXPECT_EQ(x.str(), y.str());
  std::ostringstream z;
  write_csv(z, check_monotonicity(9, 43, a));
  EXPECT_NE(x.str(), z.str());
}

TEST(Suites, RejectsZeroTrials) { EXPECT_THROW(check_monotonicity(0, 1), rejection); }
