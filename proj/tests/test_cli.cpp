#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "sigmalab/error.hpp"
#include "sigmalab/experiment.hpp"

using namespace sigmalab;
namespace fs = std::filesystem;

namespace {

const std::string kBase =
    "[experiment]\nname = NAME\nseed = 3\n\n[algebra]\nname = su2\n\n"
    "[model]\np1 = P1\np2 = P2\neps = EPS\n\n[contour]\nnodes = 128\n";

std::string make(const std::string& name, const std::string& p1, const std::string& p2, const std::string& eps,
                 const std::string& extra = "") {
  std::string s = kBase;
  auto sub = [&](const std::string& k, const std::string& v) { s.replace(s.find(k), k.size(), v); };
  sub("NAME", name);
  sub("P1", p1);
  sub("P2", p2);
  sub("EPS", eps);
  return s + extra;
}

std::string field_of(const std::string& text) {
  try {
    config::parse(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("sigmalab_test_" + name);
  fs::remove_all(p);
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SIGMALAB_CLI) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) { return config::read_file(p.string()); }

}  // namespace

TEST_CASE("complex parsing") {
  CHECK(config::parse_complex("1+2i", "f") == cplx(1, 2));
  CHECK(config::parse_complex(" -1.5 - 0.25i ", "f") == cplx(-1.5, -0.25));
  CHECK(config::parse_complex("3", "f") == cplx(3, 0));
  CHECK(config::parse_complex("-i", "f") == cplx(0, -1));
  CHECK(config::parse_complex("2e-3i", "f") == cplx(0, 2e-3));
  CHECK(config::parse_complex("1e2+1e-1i", "f") == cplx(100, 0.1));
  for (const char* bad : {"", "1+", "i2", "1+2j", "abc", "1++2i"})
    CHECK_THROWS_AS(config::parse_complex(bad, "f"), ConfigError);
  for (cplx z : {cplx(0.1, -0.3), cplx(-2, 0), cplx(1e-17, 3.25)})
    CHECK(config::parse_complex(config::format_complex(z), "f") == z);
}

TEST_CASE("config validation names the offending field") {
  CHECK(field_of(make("geometry-check", "1", "-1", "0.1")).empty());
  CHECK(field_of(make("geometry-check", "1", "1", "0.1")) == "model.p1");
  CHECK(field_of(make("geometry-check", "0", "1", "0.1")) == "model.p1");
  CHECK(field_of(make("geometry-check", "1", "-1", "0.6")) == "model.eps");
  CHECK(field_of(make("nope", "1", "-1", "0.1")) == "experiment.name");
  CHECK(field_of(make("geometry-check", "1", "-1", "0.1", "[lattice]\nn1 = 4\n")) == "lattice.n1");
  CHECK(field_of(make("geometry-check", "1", "-1", "0.1", "[lattice]\nn1 = 32\n")) == "lattice.L2");
  CHECK(field_of(make("geometry-check", "1", "-1", "0.1", "[lattice]\ncolour = red\n")) == "lattice.colour");
  CHECK(field_of(make("geometry-check", "1", "-1", "0.1", "[misc]\na = 1\n")) == "misc");
  CHECK(field_of(make("lax-scan", "2", "1", "0.2")) == "lax.z");
  CHECK(field_of(make("lax-scan", "2", "1", "0.2", "[lax]\nz = 2.2+0i\n")) == "lax.z");
  CHECK(field_of(make("lax-scan", "2", "1", "0.2", "[lax]\nz = 2.5; 0.3+0.7i\n")).empty());
  CHECK(field_of(make("geometry-check", "1", "-1", "zero")) == "model.eps");
  CHECK(field_of(make("geometry-check", "1", "-1", "inf")) == "model.eps");
  CHECK(field_of("[experiment]\nname = simulate\n") == "model.p1");
  CHECK(field_of(make("geometry-check", "1", "-1", "0.1", "[algebra]\nname = so3\n")) == "file");
  const std::string alg = kBase.substr(0, kBase.find("[algebra]")) + kBase.substr(kBase.find("[model]"));
  auto s = alg;
  s.replace(s.find("NAME"), 4, "geometry-check");
  s.replace(s.find("P1"), 2, "1");
  s.replace(s.find("P2"), 2, "-1");
  s.replace(s.find("EPS"), 3, "0.1");
  CHECK(field_of(s + "[algebra]\nname = so3\n") == "algebra.name");
}

TEST_CASE("normalized config round trip and content hash") {
  const auto cfg = config::parse(make("charges", "2", "1", "0.24", "[lax]\nz = 2.2; 0.3+0.7i\n"));
  const auto again = config::parse(config::normalized(cfg));
  CHECK(config::normalized(again) == config::normalized(cfg));
  CHECK(again.z_samples == cfg.z_samples);
  CHECK(again.model.alpha_prime == cfg.model.alpha_prime);
  CHECK(config::git_blob_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
  CHECK(config::git_blob_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST_CASE("experiments report the expected checks") {
  {
    const auto r = experiment::evaluate(config::parse(make("geometry-check", "1", "-1", "0.1")), "h");
    CHECK(r.pass());
    CHECK(r.summary["data"]["threeform_max"].get<double>() < 1e-12);
  }
  {
    const auto r = experiment::evaluate(config::parse(make("identity-check", "2", "1", "0.2")), "h");
    CHECK(r.pass());
    CHECK(r.checks.size() == 3);
  }
  {
    const auto r = experiment::evaluate(config::parse(make("beta-flow", "1", "2", "0.1", "[betaflow]\nstep = 0.005\n")), "h");
    CHECK(r.pass());
    for (const auto& c : r.checks)
      if (c.name == "dP2_deps") CHECK(c.value < 1e-6);
  }
  {
    // p1 + p2 != 0: the quadrature 3-form is -3 times the closed form.
    const auto r = experiment::evaluate(config::parse(make("geometry-check", "2", "1", "0.2")), "h");
    CHECK_FALSE(r.pass());
    const auto ratio = r.summary["data"]["threeform_over_closed_form"];
    CHECK(std::abs(ratio["re"].get<double>() + 3.0) < 1e-10);
  }
}

TEST_CASE("runs are byte-identical and the CLI maps exit codes") {
  const std::string sim = make("simulate", "2", "1", "0.24", "[lattice]\nn1 = 16\nn2 = 16\n");
  const std::string chg =
      make("charges", "2", "1", "0.24", "[lattice]\nn1 = 16\nn2 = 16\n[lax]\nz = 2.2; 0.3+0.7i\n[checks]\ndrift_tolerance = 1\n");
  for (const auto& text : {sim, chg}) {
    auto cfg = config::parse(text);
    const auto a = scratch("a"), b = scratch("b");
    cfg.output_dir = a.string();
    const auto ra = experiment::run(cfg, config::git_blob_hash(text));
    cfg.output_dir = b.string();
    experiment::run(cfg, config::git_blob_hash(text));
    CHECK(ra.summary["config_hash"] == config::git_blob_hash(text));
    for (const auto& f : ra.files) CHECK(slurp(a / f) == slurp(b / f));
    CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
  }

  const auto dir = scratch("cli");
  fs::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& body) {
    std::ofstream(dir / name) << body;
    return (dir / name).string();
  };
  const auto out = (dir / "out").string();
  CHECK(run_cli("run " + write("ok.ini", make("geometry-check", "1", "-1", "0.1")) + " -o " + out) == 0);
  CHECK(fs::exists(dir / "out" / "summary.json"));
  CHECK(run_cli("report " + out) == 0);
  CHECK(run_cli("validate " + write("bad.ini", make("geometry-check", "1", "1", "0.1"))) == 2);
  CHECK(run_cli("run " + (dir / "bad.ini").string() + " -o " + (dir / "bad").string()) == 2);
  CHECK(fs::exists(dir / "bad" / "error.json"));
  CHECK(run_cli("run " + write("red.ini", make("geometry-check", "2", "1", "0.2")) + " -o " + (dir / "red").string()) == 3);
  CHECK(run_cli("report " + (dir / "red").string()) == 3);
  CHECK(run_cli("report " + (dir / "missing").string()) == 2);
  CHECK(run_cli("run " + (dir / "absent.ini").string()) == 2);
  CHECK(run_cli("") == 2);
  // Sixteen sites at amplitude 40 blow up.
  CHECK(run_cli("run " + write("blow.ini", make("simulate", "2", "1", "0.24", "[lattice]\nn1 = 16\nn2 = 16\namplitude = 40\n")) +
                " -o " + (dir / "blow").string()) == 4);
}
