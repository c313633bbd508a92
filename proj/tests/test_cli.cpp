#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "ringmod/io.hpp"
#include "ringmod/report.hpp"

using namespace ringmod;

namespace {

struct run_result {
  int status;
  std::string out;
};

run_result run(const std::string& args) {
  const std::string cmd = std::string(RINGMOD_BIN) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  const int st = pclose(p);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::string scratch(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / ("ringmod_test_" + name);
  std::ofstream(path) << body;
  return path.string();
}

}  // namespace

TEST(Report, CsvRoundTrip) {
  report r;
  r.columns = {"a", "b"};
  r.add_row({1.0 / 3.0, -2.5e-17});
  r.add_row({std::nan(""), 1e300});
  std::stringstream ss;
  write_csv(ss, r);
  const auto back = read_csv(ss);
  ASSERT_EQ(back.rows.size(), 2u);
  EXPECT_EQ(format_number(back.rows[0][0]), format_number(1.0 / 3.0));
  EXPECT_TRUE(std::isnan(back.rows[1][0]));
  std::stringstream again;
  write_csv(again, back);
  std::stringstream first;
  write_csv(first, r);
  EXPECT_EQ(again.str(), first.str());
}

TEST(Report, RowWidth) {
  report r;
  r.columns = {"a"};
  EXPECT_THROW(r.add_row({1, 2}), rejection);
}

TEST(Io, DomainRoundTrip) {
  const domain_spec d(plane_minus_slits{{slit{{1, 0}, {2, 0}, true}, slit{{-1, 0}, {-1, 1}, false}}});
  const auto j = io::to_json(d);
  EXPECT_EQ(io::to_json(io::domain_from_json(j)), j);
  const auto c = complement(domain_spec(polygon{{{0, 0}, {1, 0}, {0, 1}}}));
  EXPECT_EQ(io::to_json(io::domain_from_json(io::to_json(c))), io::to_json(c));
}

TEST(Io, Errors) {
  EXPECT_THROW(io::domain_from_json(io::json::parse(R"({"kind":"blob"})")), rejection);
  EXPECT_THROW(io::domain_from_json(io::json::parse(R"({"kind":"disk"})")), rejection);
  EXPECT_THROW(io::quad_from_json(io::json::parse(R"({"kind":"polygon","vertices":[[0,0],[1,0],[1,1]]})")), rejection);
  EXPECT_THROW(io::read_json_file("/nonexistent/x.json"), io_error);
}

TEST(Io, RingAndStrip) {
  const auto r = io::ring_from_json(io::json::parse(
      R"({"outer":{"kind":"disk","center":[0,0],"radius":3},"inner":{"kind":"disk","center":[0.5,0],"radius":1}})"));
  EXPECT_FALSE(r.is_named());
  const auto s = io::strip_from_json(io::json::parse(
      R"({"kind":"strip","vertices":[[0,0],[5,0],[5,1],[0,1]],"ends":[[0,0.5],[5,0.5]],"map":"z","B":1})"));
  EXPECT_TRUE(s.has_map());
}

TEST(Cli, Phi) {
  const auto r = run("phi 2 --format csv");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "P,value,log_value\n2,7.45928359681,2.00945937701\n");
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run("modulus --kind ring").status, 2);
  EXPECT_EQ(run("phi 2 --bogus").status, 2);
  EXPECT_EQ(run("").status, 2);
  EXPECT_EQ(run("verify --suite monotonicity --resolution 8").status, 2);
  EXPECT_EQ(run("modulsatz --probe bump --g1 a.json").status, 2);
  EXPECT_EQ(run("verify --suite nothing").status, 2);
}

TEST(Cli, BadInput) {
  const auto f = scratch("bad.json", R"({"kind":"annulus","r":2,"R":1})");
  EXPECT_EQ(run("modulus --domain " + f).status, 3);
  EXPECT_EQ(run("modulus --domain /nonexistent.json").status, 4);
  const auto ok = scratch("ann.json", R"({"kind":"annulus","r":1,"R":2})");
  EXPECT_EQ(run("modulus --domain " + ok + " --output /nonexistent/dir/x.csv").status, 4);
}

TEST(Cli, ModulusAndOutput) {
  const auto f = scratch("ann2.json", R"({"kind":"annulus","r":1,"R":4})");
  const auto out = (std::filesystem::temp_directory_path() / "ringmod_test_out.csv").string();
  const auto r = run("modulus --domain " + f + " --resolution 32 --output " + out);
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("module: 1.38629436112"), std::string::npos);
  std::ifstream in(out);
  const auto rep = read_csv(in);
  EXPECT_NEAR(rep.rows[0][1], std::log(4.0), 1e-9);
}

TEST(Cli, EnvResolution) {
  const auto f = scratch("ann3.json", R"({"kind":"annulus","r":1,"R":4})");
  setenv("RINGMOD_RESOLUTION", "48", 1);
  const auto r = run("modulus --domain " + f);
  unsetenv("RINGMOD_RESOLUTION");
  EXPECT_NE(r.out.find("resolution: 48"), std::string::npos);
}

TEST(Cli, DeterministicVerify) {
  const auto a = run("verify --suite quad_inequalities --trials 15 --seed 7 --format csv");
  const auto b = run("verify --suite quad_inequalities --trials 15 --seed 7 --format csv --jobs 3");
  EXPECT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, QcAndStrip) {
  const auto q = run("qc --map \"radial:g=0;eta=log(r)\" --experiment twb --lambda-max 8 --steps 8");
  EXPECT_EQ(q.status, 0);
  EXPECT_NE(q.out.find("Main Lemma conclusion holds, TWB conclusion fails"), std::string::npos);
  const auto s = scratch("sector.json", R"({"kind":"sector","beta":0.5235987755982988,"length":40})");
  const auto r = run("strip --domain " + s + " --x1 1 --x2 20 --check ahlfors");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("verdict: holds"), std::string::npos);
}

TEST(Cli, ModulsatzFiles) {
  const auto g1 = scratch("g1.json", R"({"kind":"disk","center":[0,0],"radius":2})");
  const auto g2 = scratch("g2.json", R"({"kind":"complement-of","base":{"kind":"disk","center":[0,0],"radius":2}})");
  const auto r = run("modulsatz --g1 " + g1 + " --g2 " + g2 + " --resolution 64");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("delta nonnegative"), std::string::npos);
}
