#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "warpgeo/config.hpp"
#include "warpgeo/suite.hpp"

using namespace warpgeo;

namespace {

SuiteConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test.cfg");
}

const char* kBase = R"(
seed = 11
grids = 32, 64
[ambient e]
kind = euclidean
n = 2
[ambient d3]
kind = dss
n = 3
[surface ball]
ambient = e
type = circle
radius = 1
[surface egg]
ambient = e
type = ellipse
a = 1.5
[surface s3]
ambient = d3
type = slice
r0 = 1
)";

std::string csv_of(const SuiteReport& r) {
  std::ostringstream out;
  write_csv(r, out);
  return out.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(WARPGEO_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("warpgeo_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = parse(std::string(kBase) + "[check key]\ntype = integral_formula\nk = 1\n");
  CHECK(cfg.seed == 11);
  CHECK(cfg.grids == std::vector<int>{32, 64});
  CHECK(cfg.ambients.size() == 2);
  CHECK(cfg.surfaces.size() == 3);
  REQUIRE(cfg.checks.size() == 1);
  CHECK(cfg.checks[0].type == "integral_formula");
  CHECK(cfg.surface("egg").params.real("a") == 1.5);
  CHECK(cfg.ambient("d3").n == 3);

  SUBCASE("comments and blank lines") {
    const auto c = parse("# comment\n\nseed = 4   # trailing\n");
    CHECK(c.seed == 4);
    CHECK(c.checks.empty());
  }
  SUBCASE("errors carry the location") {
    auto fails_with = [](const std::string& text, const std::string& needle) {
      try {
        parse(text);
      } catch (const ConfigError& e) {
        return std::string(e.what()).find(needle) != std::string::npos;
      }
      return false;
    };
    CHECK(fails_with("[check c]\ntype = bogus\n", "unknown check type 'bogus'"));
    CHECK(fails_with("[thing x]\n", "unknown section kind"));
    CHECK(fails_with("seed = -1\n", "seed"));
    CHECK(fails_with("colour = red\n", "'colour' is not recognized"));
    CHECK(fails_with("[ambient a]\nkind = euclidean\nn = two\n", "test.cfg:1"));
    CHECK(fails_with("[ambient a]\nkind = nowhere\n", "unknown ambient kind"));
    CHECK(fails_with("[surface s]\nambient = missing\ntype = circle\n", "unknown ambient 'missing'"));
    CHECK(fails_with(std::string(kBase) + "[surface t]\nambient = e\ntype = circle\nradus = 2\n", "radus"));
    CHECK(fails_with(std::string(kBase) + "[surface g]\nambient = e\ntype = graph\nterms = 2:3:0.1\n", "|m| <= l"));
    CHECK(fails_with("seed = 1\nseed = 2\n", "duplicate key"));
    CHECK(fails_with("[ambient a]\nkind = euclidean\n[ambient a]\nkind = sphere\n", "duplicate ambient"));
    CHECK(fails_with("just words\n", "expected key = value"));
  }
  SUBCASE("check keys are validated before any job runs") {
    const auto c = parse(std::string(kBase) + "[check key]\ntype = integral_formula\ntolerence = 1\n");
    CHECK_THROWS_AS(run_suite(c), ConfigError);
    const auto d = parse(std::string(kBase) + "[check key]\ntype = theorem\nsurfaces = nope\n");
    CHECK_THROWS_AS(run_suite(d), ConfigError);
  }
}

TEST_CASE("surface descriptions") {
  const auto s = parse_surface_line("graph base=1.2 terms=2:0:0.1,3:-1:0.02");
  CHECK(s.type == "graph");
  const auto terms = parse_terms(s.params.str("terms"));
  REQUIRE(terms.size() == 2);
  CHECK(terms[1].l == 3);
  CHECK(terms[1].m == -1);
  CHECK(terms[1].coeff == 0.02);
  CHECK_THROWS_AS(parse_surface_line("torus"), ConfigError);
  CHECK_THROWS_AS(parse_surface_line("ellipse a"), ConfigError);
  CHECK_THROWS_AS(parse_surface_line("ellipse b=2"), ConfigError);
}

TEST_CASE("suite runs") {
  SUBCASE("empty check list") {
    const auto r = run_suite(parse(kBase));
    CHECK(r.rows.empty());
    CHECK(r.exit_code() == 0);
    CHECK(csv_of(r) == "# seed=11\ncheck,surface,ambient,k,alpha,N,value,scale,tolerance,passed,order\n");
  }
  SUBCASE("k = 0 for nablaHk is a per-job error") {
    const auto r = run_suite(parse(std::string(kBase) + "[check t]\ntype = theorem\ntheorem = nablaHk\nk = 0\nsurfaces = s3\n"));
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].status == RowStatus::Error);
    CHECK(r.exit_code() == 1);
  }
  SUBCASE("surface build failure is reported per job") {
    const auto r = run_suite(parse(std::string(kBase) +
                                   "[ambient s]\nkind = sphere\n[surface far]\nambient = s\ntype = slice\nr0 = 4\n"
                                   "[check key]\ntype = integral_formula\nsurfaces = far, ball\n"));
    CHECK(r.count(RowStatus::Error) == 1);
    CHECK(r.count(RowStatus::Pass) == 2);
    CHECK(r.exit_code() == 1);
  }
  SUBCASE("Hk statements above the surface dimension are skipped") {
    const auto r = run_suite(parse(std::string(kBase) + "[check t]\ntype = theorem\ntheorem = nablaHk\nk = 2\nsurfaces = ball, s3\n"));
    REQUIRE(r.rows.size() == 3);
    CHECK(r.rows[0].surface == "ball");
    CHECK(r.rows[0].status == RowStatus::Skip);
    CHECK(r.rows[1].status == RowStatus::Pass);
    CHECK(r.exit_code() == 0);
  }
  SUBCASE("convergence order on the finest row") {
    const auto r = run_suite(parse(std::string(kBase) +
                                   "[check key]\ntype = integral_formula\nsurfaces = egg\ngrids = 32, 64, 128\nmin_order = 1.9\n"));
    REQUIRE(r.rows.size() == 3);
    CHECK_FALSE(r.rows[0].order.has_value());
    REQUIRE(r.rows[2].order.has_value());
    CHECK(*r.rows[2].order >= 1.9);
    CHECK(r.rows[0].normalized() > r.rows[1].normalized());
    CHECK(r.rows[1].normalized() > r.rows[2].normalized());
  }
  SUBCASE("sorted and independent of the worker count") {
    const auto cfg = parse(std::string(kBase) +
                           "[check key]\ntype = integral_formula\n"
                           "[check cp]\ntype = critical_point\nsurfaces = ball, egg\ngrids = 64\n"
                           "[check sl]\ntype = slice_solve\nambient = e\nrandom = 4\nexpect_r0 = 1\n");
    const auto one = run_suite(cfg, {1, std::nullopt});
    const auto four = run_suite(cfg, {4, std::nullopt});
    CHECK(csv_of(one) == csv_of(four));
    CHECK(one.exit_code() == 0);
    for (std::size_t i = 1; i < one.rows.size(); ++i) CHECK(one.rows[i - 1].surface <= one.rows[i].surface);
    const auto reseeded = run_suite(cfg, {1, std::uint64_t{99}});
    CHECK(reseeded.seed == 99);
    CHECK(csv_of(reseeded) != csv_of(one));
  }
}

TEST_CASE("plot files") {
  const auto r = run_suite(parse(std::string(kBase) +
                                 "[check key]\ntype = integral_formula\nsurfaces = egg\ngrids = 32, 64, 128\n"
                                 "[check one]\ntype = ricci_term\nsurfaces = ball\ngrids = 32\n"));
  const auto dir = temp_dir("plots");
  const auto files = write_plot_files(r, dir);
  REQUIRE(files.size() == 1);
  CHECK(files[0].filename() == "key_egg_k1.dat");
  std::ifstream f(files[0]);
  std::string header;
  std::getline(f, header);
  CHECK(header == "# N residual");
  int N = 0, lines = 0;
  double res = 0.0, prev = 1e300;
  while (f >> N >> res) {
    CHECK(res < prev);
    prev = res;
    ++lines;
  }
  CHECK(lines == 3);

  try {
    write_plot_files(r, dir / "missing");
    FAIL("expected an error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("missing") != std::string::npos);
  }
}

TEST_CASE("command-line exit codes") {
  const auto dir = temp_dir("cli");
  const auto cfg = dir / "suite.cfg";
  std::ofstream(cfg) << kBase << "[check key]\ntype = integral_formula\nsurfaces = egg\n";
  const auto bad = dir / "bad.cfg";
  std::ofstream(bad) << "[check x]\ntype = bogus\n";
  const auto k0 = dir / "k0.cfg";
  std::ofstream(k0) << kBase << "[check t]\ntype = theorem\ntheorem = nablaHk\nk = 0\nsurfaces = s3\n";

  CHECK(run_cli("run " + cfg.string() + " --out " + dir.string()) == 0);
  CHECK(std::filesystem::exists(dir / "report.csv"));
  CHECK(run_cli("run " + k0.string() + " --out " + dir.string()) == 1);
  CHECK(run_cli("run " + bad.string() + " --out " + dir.string()) == 2);
  CHECK(run_cli("run " + cfg.string() + " --out " + (dir / "nope").string()) == 2);
  CHECK(run_cli("run " + (dir / "absent.cfg").string()) == 2);
  CHECK(run_cli("describe euclidean") == 0);
  CHECK(run_cli("describe dss m=1 n=2") == 0);
  CHECK(run_cli("describe nowhere") == 2);
  CHECK(run_cli("describe sphere z=1") == 2);
  CHECK(run_cli("counterexample --a 2 --n 2 --N 128") == 0);
  CHECK(run_cli("variational --surface circle --N 64 --modes 5") == 0);
  CHECK(run_cli("variational --psi cubic:1") == 2);
  CHECK(run_cli("") == 2);

  const auto env_dir = temp_dir("cli_env");
  const std::string cmd = "WARPGEO_OUT=" + env_dir.string() + " " + WARPGEO_CLI + " run " + cfg.string() +
                          " --quiet > /dev/null 2>&1";
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(std::filesystem::exists(env_dir / "report.csv"));
}
