// One PASS/FAIL line per acceptance criterion; exit status 1 if any line fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>

#include "ringmod/elliptic.hpp"
#include "ringmod/invariants.hpp"
#include "ringmod/modsolver.hpp"
#include "ringmod/modulsatz.hpp"
#include "ringmod/qcmap.hpp"
#include "ringmod/strip.hpp"

using namespace ringmod;

namespace {

struct outcome {
  bool pass;
  std::string detail;
};

double num(const report& r, const char* key) { return parse_number(r.value_of(key)); }

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

int threads() { return std::max(1u, std::thread::hardware_concurrency()); }

outcome elliptic_exact() {
  double worst = std::abs(grotzsch_phi(std::sqrt(2.0)) / std::exp(pi / 2) - 1);
  worst = std::max(worst, std::abs(teich_psi(1.0) / std::exp(pi) - 1));
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> u(-2, 3);
  double rel = 0;
  for (int i = 0; i < 100; ++i) {
    const double P = std::pow(10.0, u(g));
    rel = std::max(rel, std::abs(log_teich_psi(P) / (2 * log_grotzsch_phi(std::sqrt(P + 1))) - 1));
    const double Q = 1 + P;
    rel = std::max(rel, std::abs(log_teich_psi(Q * Q - 1) / (2 * log_grotzsch_phi(Q)) - 1));
  }
  return {worst <= 1e-10 && rel <= 1e-9, fmt("exact rel err %.2e, relations rel err %.2e", worst, rel)};
}

outcome grotzsch_oracle() {
  double worst = 0;
  for (double P : {1.5, 2.0, 4.0, 8.0}) {
    modulus_options o;
    o.jobs = threads();
    const auto m = ring_modulus(ring_domain_spec::named(domain_spec(grotzsch{P})), 128, o);
    worst = std::max(worst, std::abs(m.value - mu(1 / P)));
  }
  return {worst <= 1e-2, fmt("resolution 128, worst |M - mu(1/P)| = %.2e", worst)};
}

outcome annulus_calibration() {
  std::mt19937_64 g(2);
  std::uniform_real_distribution<double> u(0, 1);
  double worst = 0;
  for (int i = 0; i < 20; ++i) {
    const double r = std::exp(-2 + 3 * u(g)), R = r * std::exp(0.05 + 4 * u(g));
    const auto m = ring_modulus(ring_domain_spec::named(domain_spec(annulus{r, R})), 256);
    worst = std::max(worst, std::abs(m.value - std::log(R / r)));
  }
  return {worst <= 1e-3, fmt("20 annuli at 256, worst err %.2e", worst)};
}

outcome phi_asymptotics() {
  bool inc = true, psi_ok = true;
  double prev = 0;
  for (int k = 0; k < 50; ++k) {
    const double P = std::pow(10.0, 0.01 + 3.0 * k / 49);
    const double q = grotzsch_phi(P) / (4 * P);
    if (!(q > prev)) inc = false;
    prev = q;
    if (!(teich_psi(P) < 16 * (P + 1))) psi_ok = false;
  }
  const double q = grotzsch_phi(1000) / 4000;
  return {inc && psi_ok && q > 0.99999 && q < 1, fmt("increasing %g, Phi(1e3)/4e3 = %.10f, Psi bound %g", inc, q, psi_ok)};
}

outcome inequality_suites() {
  suite_options o;
  o.jobs = threads();
  int violations = 0;
  std::string d;
  for (auto* f : {&check_monotonicity, &check_superadditivity, &check_log_area, &check_reduced_sum, &check_quad_inequalities}) {
    const auto r = f(1000, 2024, o);
    violations += r.violations;
    d += r.value_of("suite") + " " + std::to_string(r.violations) + "/" + r.value_of("trials") + " (skip " +
         r.value_of("skipped") + ") ";
  }
  return {violations == 0, d};
}

outcome t3_sharpness() {
  const auto p = verify_t3(qc_map::power(2), 1, std::exp(1.0));
  const auto id = verify_t3(qc_map::identity(), 1, std::exp(1.0));
  const double m = num(p, "module"), up = num(p, "upper");
  const double gi = std::max(std::abs(num(id, "module") - num(id, "upper")), std::abs(num(id, "module") - num(id, "lower")));
  return {std::abs(m - 2) <= 1e-3 && std::abs(m - up) <= 1e-3 && gi <= 1e-3,
          fmt("power(2) module %.6f upper %.6f, identity gap %.1e", m, up, gi)};
}

outcome main_lemma() {
  experiment_options o;
  const auto a = main_lemma_experiment(qc_map::parse("radial:g=1/(1+r);eta=0"), lambda_ladder(1, 12, 12), o);
  const auto b = main_lemma_experiment(qc_map::parse("radial:g=0.1*log(r);eta=0"), lambda_ladder(1, 12, 12), o);
  o.tolerance = 1e-2;
  const auto c = main_lemma_experiment(qc_map::ellipse(1), lambda_ladder(1, 8, 8), o);
  const bool pa = a.value_of("conclusion") == "shifts converge" &&
                  std::max(std::abs(num(a, "final_shift1")), std::abs(num(a, "final_shift2"))) <= 1e-3;
  const double slope = num(b, "shift_slope");
  const bool pb = b.value_of("conclusion") == "shifts do not converge" && std::abs(slope - 0.1) <= 1e-3;
  const bool pc = c.value_of("conclusion") == "shifts converge" && num(c, "final_omega") <= 1e-2 &&
                  std::max(std::abs(num(c, "final_shift1")), std::abs(num(c, "final_shift2"))) <= 1e-2;
  return {pa && pb && pc, fmt("(a) %g (b) slope %.5f (c) final omega %.2e", pa, slope, num(c, "final_omega")) +
                              (pb ? "" : " (b) failed") + (pc ? "" : " (c) failed")};
}

outcome twb() {
  const auto r = twb_experiment(qc_map::parse("radial:g=0;eta=log(r)"), lambda_ladder(1, 8, 8));
  const bool ok = std::abs(num(r, "abs_limit") - 1) <= 1e-12 && num(r, "arg_traverse") >= 2 * pi &&
                  r.value_of("conclusion") == "Main Lemma conclusion holds, TWB conclusion fails";
  return {ok, "|w/z| " + r.value_of("abs_limit") + ", arg traverse " + r.value_of("arg_traverse") + ", \"" +
                  r.value_of("conclusion") + "\""};
}

outcome ahlfors() {
  const auto s = ahlfors_check(strip_spec::straight(1, 0, 10), 1, 6);
  const auto t = ahlfors_check(strip_spec::sector(pi / 6, 40), 1, 20);
  const double k2 = refined_constant(2.0);
  bool below = true;
  for (double I = 2.001; I < 40; I *= 1.05)
    if (!(refined_constant(I) <= 4)) below = false;
  const bool ok = std::abs(num(s, "margin") - 4) <= 1e-9 && s.value_of("verdict") == "holds" &&
                  t.value_of("verdict") == "holds" && std::abs(k2 - 0.887) <= 1e-3 && below;
  return {ok, fmt("straight margin %.9f, sector margin %.4f, constant(2) = %.6f", num(s, "margin"), num(t, "margin"), k2)};
}

outcome bump() {
  const auto r = bump_family_probe({0.05, 0.1, 0.2});
  const bool ok = r.value_of("delta_nonnegative") == "yes" && r.value_of("epsilon_follows_delta") == "yes" &&
                  r.value_of("ratio_within_decade") == "yes";
  return {ok, "ratio " + r.value_of("ratio_min") + " .. " + r.value_of("ratio_max")};
}

std::string capture(const std::string& args) {
  const std::string cmd = std::string(RINGMOD_BIN) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {};
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  pclose(p);
  return out;
}

outcome determinism() {
  const char* runs[] = {
      "phi 2 3 --format csv",
      "verify --suite monotonicity --trials 12 --seed 5 --format csv",
      "verify --suite reduced_sum --trials 8 --seed 9 --jobs 4 --format csv",
      "qc --map \"radial:g=1/(1+r);eta=0\" --experiment mainlemma --format csv",
      "modulsatz --probe bump --format csv",
      "modulsatz --probe region-b --trials 6 --seed 3 --format csv",
  };
  int same = 0, total = 0;
  for (const char* a : runs) {
    ++total;
    const auto x = capture(a), y = capture(a);
    if (!x.empty() && x == y) ++same;
  }
  return {same == total, std::to_string(same) + "/" + std::to_string(total) + " invocations byte-identical"};
}

}  // namespace

int main() {
  struct criterion {
    const char* name;
    double limit;
    std::function<outcome()> run;
  };
  const criterion all[] = {
      {"elliptic exactness", 1, elliptic_exact},
      {"grotzsch vs elliptic oracle", 120, grotzsch_oracle},
      {"round annulus calibration", 60, annulus_calibration},
      {"phi/psi asymptotics", 1, phi_asymptotics},
      {"inequality suites x1000", 1800, inequality_suites},
      {"t3 sharpness", 60, t3_sharpness},
      {"main lemma triptych", 300, main_lemma},
      {"twb boundary case", 60, twb},
      {"ahlfors fixtures", 120, ahlfors},
      {"modulsatz bump trend", 600, bump},
      {"cli determinism", 600, determinism},
  };
  int failed = 0, k = 0;
  for (const auto& c : all) {
    ++k;
    const auto t0 = std::chrono::steady_clock::now();
    outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && dt <= c.limit;
    if (!pass) ++failed;
    std::printf("%s %2d %s (%.2f s, limit %.0f s): %s\n", pass ? "PASS" : "FAIL", k, c.name, dt, c.limit, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
