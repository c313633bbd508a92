// ringmod: command-line frontend.
//
// Every subcommand builds one report. The report's summary goes to stdout as text (or the
// table as CSV with --format csv); --output writes the table as CSV to a file.
// Exit status: 0 clean, 1 violations or no verdict, 2 usage, 3 rejected input or
// numerical diagnostic, 4 I/O failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ringmod/elliptic.hpp"
#include "ringmod/invariants.hpp"
#include "ringmod/io.hpp"
#include "ringmod/modsolver.hpp"
#include "ringmod/modulsatz.hpp"
#include "ringmod/qcmap.hpp"
#include "ringmod/report.hpp"
#include "ringmod/strip.hpp"

using namespace ringmod;

namespace {

struct run_config {
  std::string format = "text";
  std::string output;
  std::optional<int> resolution;
  int jobs = 1;
  std::uint64_t seed = 0;
  std::optional<double> tolerance;

  std::vector<double> values;  // phi, psi
  std::string kind = "ring", domain, at;
  bool infinity = false, no_extrapolate = false;
  int phases = 4;

  std::string suite;
  int trials = 100;
  double threshold = pi;

  std::string map, experiment = "mainlemma", C, direction = "plane-to-disk";
  double lambda_min = 1.0, lambda_max = 12.0, r1 = 1.0, r2 = std::exp(1.0), S = 4.0;
  int steps = 12, samples = 512;

  double x1 = 0.0, x2 = 0.0, B = 1.0;
  std::string check = "ahlfors";

  std::string g1, g2, ring, probe;
  std::vector<double> ts{0.05, 0.1, 0.2};
};

int res_or(const run_config& c, int fallback) { return c.resolution.value_or(fallback); }

point parse_point(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw rejection("--at expects x,y");
  return {parse_number(detail::trim(s.substr(0, comma))), parse_number(detail::trim(s.substr(comma + 1)))};
}

report elliptic_table(const run_config& c, bool psi) {
  report rep;
  rep.name = psi ? "teichmuller psi" : "grotzsch phi";
  rep.columns = {"P", "value", "log_value"};
  for (double P : c.values) {
    const double lv = psi ? log_teich_psi(P) : log_grotzsch_phi(P);
    rep.add_row({P, std::exp(lv), lv});
    rep.note(format_number(P), std::exp(lv));
  }
  return rep;
}

report modulus_cmd(const run_config& c) {
  modulus_options m;
  m.extrapolate = !c.no_extrapolate;
  m.phases = c.phases;
  m.jobs = c.jobs;
  const auto j = io::read_json_file(c.domain);
  const int N = res_or(c, 128);
  const auto r = c.kind == "ring" ? ring_modulus(io::ring_from_json(j), N, m) : quad_modulus(io::quad_from_json(j), N, m);
  report rep;
  rep.name = c.kind == "ring" ? "ring module" : "quadrilateral module";
  rep.columns = {"resolution", "module", "error", "raw", "energy", "observed_order"};
  rep.add_row({double(r.resolution), r.value, r.error_estimate, r.raw_value, r.energy, r.observed_order});
  rep.note("module", r.value);
  rep.note("error", r.error_estimate);
  rep.note("resolution", r.resolution);
  rep.note("extrapolated", r.extrapolated ? "yes" : "no");
  return rep;
}

report reduced_cmd(const run_config& c) {
  modulus_options m;
  m.phases = c.phases;
  m.jobs = c.jobs;
  const auto d = io::domain_from_json(io::read_json_file(c.domain));
  std::optional<point> at;
  if (!c.infinity) at = parse_point(c.at);
  const auto r = reduced_modulus(d, at, res_or(c, 128), m);
  report rep;
  rep.name = "reduced module";
  rep.columns = {"rho", "rung"};
  for (std::size_t i = 0; i < r.rho.size(); ++i) rep.add_row({r.rho[i], r.rung[i]});
  rep.note("reduced_module", r.module.value);
  rep.note("error", r.module.error_estimate);
  rep.note("conformal_radius", std::exp(r.module.value));
  rep.note("boundary_distance", r.boundary_distance);
  return rep;
}

report verify_cmd(const run_config& c) {
  suite_options o;
  o.resolution = res_or(c, o.resolution);
  o.jobs = c.jobs;
  if (c.tolerance) o.tolerance = *c.tolerance;
  const auto& s = c.suite;
  if (s == "monotonicity") return check_monotonicity(c.trials, c.seed, o);
  if (s == "superadditivity") return check_superadditivity(c.trials, c.seed, o);
  if (s == "log_area") return check_log_area(c.trials, c.seed, o);
  if (s == "reduced_sum") return check_reduced_sum(c.trials, c.seed, o);
  if (s == "quad_inequalities") return check_quad_inequalities(c.trials, c.seed, o);
  if (s == "grotzsch_extremal") return check_grotzsch_extremal(c.trials, c.seed, o);
  if (s == "teich_extremal") return check_teich_extremal(c.trials, c.seed, o);
  if (s == "slit_annulus_extremal") return check_slit_annulus_extremal(c.trials, c.seed, o);
  if (s == "circle_containment") return check_circle_containment(c.trials, c.seed, c.threshold, o);
  if (s == "region_b") return region_b_sampler(c.trials, c.seed, o);
  throw CLI::ValidationError("--suite", "unknown suite '" + s + "'");
}

report oscillation_table(const qc_map& f, const std::vector<double>& lambdas, int samples) {
  report rep;
  rep.name = "image circle oscillation";
  rep.columns = {"lambda", "r1", "r2", "omega", "shift1", "shift2"};
  for (double l : lambdas) {
    const auto st = image_circle_stats(f, l, samples);
    rep.add_row({l, st.r1, st.r2, st.omega, st.shift1, st.shift2});
  }
  rep.note("map", f.str());
  rep.note("final_omega", rep.rows.back()[3]);
  return rep;
}

report qc_cmd(const run_config& c) {
  experiment_options o;
  o.resolution = res_or(c, o.resolution);
  o.samples = c.samples;
  o.modulus.jobs = c.jobs;
  if (c.tolerance) o.tolerance = *c.tolerance;
  const auto& e = c.experiment;
  if (e == "type") {
    if (c.C.empty()) throw CLI::RequiredError("--C");
    const auto dir = c.direction == "disk-to-plane" ? type_direction::disk_to_plane : type_direction::plane_to_disk;
    return type_condition(expr::parse(c.C, 'r'), dir, c.S);
  }
  if (c.map.empty()) throw CLI::RequiredError("--map");
  const auto f = qc_map::parse(c.map);
  if (e == "t3") return verify_t3(f, c.r1, c.r2, o);
  const auto ladder = lambda_ladder(c.lambda_min, c.lambda_max, c.steps);
  if (e == "mainlemma") return main_lemma_experiment(f, ladder, o);
  if (e == "twb") return twb_experiment(f, ladder, o);
  if (e == "t2") return lemma_t2_check(f, ladder, o);
  if (e == "oscillation") return oscillation_table(f, ladder, c.samples);
  throw CLI::ValidationError("--experiment", "unknown experiment '" + e + "'");
}

report strip_cmd(const run_config& c) {
  const auto s = io::strip_from_json(io::read_json_file(c.domain));
  strip_options o;
  o.resolution = res_or(c, o.resolution);
  o.B = c.B;
  if (c.check == "ahlfors") return ahlfors_check(s, c.x1, c.x2, o);
  if (c.check == "refined") return refined_distortion_check(s, c.x1, c.x2, o);
  if (c.check == "thetabound") {
    modulus_options m;
    m.jobs = c.jobs;
    return theta_module_bound(s, c.x1, c.x2, o, m);
  }
  if (c.check == "theta") {
    std::vector<double> xs;
    const int n = c.steps;
    for (int k = 0; k <= n; ++k) xs.push_back(c.x1 + (c.x2 - c.x1) * k / n);
    const auto p = theta_profile(s, xs, o.resolution);
    report rep;
    rep.name = "theta profile";
    rep.columns = {"x", "theta", "multi"};
    for (std::size_t i = 0; i < p.x.size(); ++i) rep.add_row({p.x[i], p.theta[i], double(p.multi[i])});
    const auto I = integrate_inverse_theta(s, c.x1, c.x2, o.samples, o.resolution);
    rep.note("I", I.value);
    rep.note("I_error", I.error);
    rep.note("theta_min", I.theta_min);
    return rep;
  }
  throw CLI::ValidationError("--check", "unknown check '" + c.check + "'");
}

report modulsatz_cmd(const run_config& c) {
  modulsatz_options o;
  o.resolution = res_or(c, o.resolution);
  o.modulus.jobs = c.jobs;
  if (c.probe == "bump") return bump_family_probe(c.ts, o);
  if (c.probe == "region-b") {
    suite_options so;
    so.resolution = res_or(c, so.resolution);
    so.jobs = c.jobs;
    if (c.tolerance) so.tolerance = *c.tolerance;
    return region_b_sampler(c.trials, c.seed, so);
  }
  if (!c.probe.empty()) throw CLI::ValidationError("--probe", "unknown probe '" + c.probe + "'");
  if (c.g1.empty() || c.g2.empty()) throw CLI::RequiredError("--g1 and --g2");
  const auto j1 = io::read_json_file(c.g1), j2 = io::read_json_file(c.g2);
  if (!c.ring.empty())
    return verify_modulsatz(io::ring_from_json(io::read_json_file(c.ring)), io::ring_from_json(j1), io::ring_from_json(j2), o);
  return verify_special_modulsatz(io::domain_from_json(j1), io::domain_from_json(j2), o);
}

int emit(const report& rep, const run_config& c) {
  if (!c.output.empty()) {
    std::ofstream out(c.output);
    if (!out) throw io_error("cannot write '" + c.output + "'");
    write_csv(out, rep);
    if (!out) throw io_error("write to '" + c.output + "' failed");
  }
  if (c.format == "csv") write_csv(std::cout, rep);
  else write_text(std::cout, rep);
  if (rep.violations > 0) {
    const auto w = rep.value_of("worst_margin");
    std::cerr << "violations: " << rep.violations << (w.empty() ? "" : ", worst margin " + w) << '\n';
    return 1;
  }
  return rep.failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ringmod: moduli of ring domains and quadrilaterals, distortion experiments"};
  app.require_subcommand(1);
  run_config c;

  auto common = [&](CLI::App* s) {
    s->add_option("--resolution", c.resolution, "grid resolution (default per subcommand)")
        ->check(CLI::Range(16, 4096))
        ->envname("RINGMOD_RESOLUTION");
    s->add_option("--jobs", c.jobs, "concurrent solves")->check(CLI::Range(1, 256));
    s->add_option("--output", c.output, "write the table as CSV");
    s->add_option("--format", c.format, "stdout format")->check(CLI::IsMember({"csv", "text"}));
  };
  auto tol = [&](CLI::App* s) { s->add_option("--tolerance", c.tolerance)->check(CLI::PositiveNumber); };

  auto* phi = app.add_subcommand("phi", "Grotzsch module function");
  phi->add_option("P", c.values)->required()->check(CLI::PositiveNumber);
  common(phi);
  auto* psi = app.add_subcommand("psi", "Teichmuller module function");
  psi->add_option("P", c.values)->required()->check(CLI::PositiveNumber);
  common(psi);

  auto* mod = app.add_subcommand("modulus", "module of a ring domain or quadrilateral");
  mod->add_option("--kind", c.kind)->check(CLI::IsMember({"ring", "quad"}));
  mod->add_option("--domain", c.domain, "domain JSON file")->required();
  mod->add_flag("--no-extrapolate", c.no_extrapolate);
  mod->add_option("--phases", c.phases)->check(CLI::Range(1, 16));
  common(mod);

  auto* red = app.add_subcommand("reduced", "reduced module at a point or at infinity");
  red->add_option("--domain", c.domain)->required();
  auto* at = red->add_option("--at", c.at, "x,y");
  auto* inf = red->add_flag("--infinity", c.infinity);
  at->excludes(inf);
  red->add_option("--phases", c.phases)->check(CLI::Range(1, 16));
  common(red);

  auto* ver = app.add_subcommand("verify", "seeded inequality suite");
  ver->add_option("--suite", c.suite)->required();
  ver->add_option("--trials", c.trials)->check(CLI::Range(1, 1000000));
  ver->add_option("--seed", c.seed);
  ver->add_option("--threshold", c.threshold)->check(CLI::PositiveNumber);
  tol(ver);
  common(ver);

  auto* qc = app.add_subcommand("qc", "quasiconformal map experiments");
  qc->add_option("--map", c.map, "map spec, e.g. radial:g=1/(1+r);eta=0");
  qc->add_option("--experiment", c.experiment)
      ->check(CLI::IsMember({"mainlemma", "twb", "t3", "t2", "oscillation", "type"}));
  qc->add_option("--lambda-min", c.lambda_min);
  qc->add_option("--lambda-max", c.lambda_max);
  qc->add_option("--steps", c.steps)->check(CLI::Range(1, 100000));
  qc->add_option("--r1", c.r1)->check(CLI::PositiveNumber);
  qc->add_option("--r2", c.r2)->check(CLI::PositiveNumber);
  qc->add_option("--samples", c.samples)->check(CLI::Range(16, 1 << 20));
  qc->add_option("--C", c.C, "dilatation bound C(r) for --experiment type");
  qc->add_option("--direction", c.direction)->check(CLI::IsMember({"plane-to-disk", "disk-to-plane"}));
  qc->add_option("--S", c.S)->check(CLI::PositiveNumber);
  tol(qc);
  common(qc);

  auto* st = app.add_subcommand("strip", "strip distortion checks");
  st->add_option("--domain", c.domain)->required();
  st->add_option("--x1", c.x1)->required();
  st->add_option("--x2", c.x2)->required();
  st->add_option("--check", c.check)->check(CLI::IsMember({"ahlfors", "refined", "thetabound", "theta"}));
  st->add_option("--B", c.B, "strip width for domains without a map")->check(CLI::PositiveNumber);
  st->add_option("--steps", c.steps)->check(CLI::Range(1, 100000));
  common(st);

  auto* ms = app.add_subcommand("modulsatz", "deficit against circularity");
  auto* o1 = ms->add_option("--g1", c.g1, "domain about 0, or inner subring");
  auto* o2 = ms->add_option("--g2", c.g2, "domain about infinity, or outer subring");
  auto* oring = ms->add_option("--ring", c.ring, "ambient annulus for subrings");
  auto* pr = ms->add_option("--probe", c.probe)->check(CLI::IsMember({"bump", "region-b"}));
  ms->add_option("--t", c.ts)->delimiter(',');
  ms->add_option("--trials", c.trials)->check(CLI::Range(1, 1000000));
  ms->add_option("--seed", c.seed);
  pr->excludes(o1)->excludes(o2)->excludes(oring);
  tol(ms);
  common(ms);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    report rep;
    auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "phi") rep = elliptic_table(c, false);
    else if (name == "psi") rep = elliptic_table(c, true);
    else if (name == "modulus") rep = modulus_cmd(c);
    else if (name == "reduced") {
      if (!c.infinity && c.at.empty()) throw CLI::RequiredError("--at or --infinity");
      rep = reduced_cmd(c);
    } else if (name == "verify") rep = verify_cmd(c);
    else if (name == "qc") rep = qc_cmd(c);
    else if (name == "strip") rep = strip_cmd(c);
    else rep = modulsatz_cmd(c);
    return emit(rep, c);
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << '\n' << app.help();
    return 2;
  } catch (const io_error& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 4;
  } catch (const rejection& e) {
    std::cerr << "rejected: " << e.what() << '\n';
    return 3;
  } catch (const diagnostic& e) {
    std::cerr << "diagnostic: " << e.what() << '\n';
    return 3;
  }
}
