#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "rlw/cli.hpp"
#include "rlw/errors.hpp"
#include "rlw/io.hpp"
#include "rlw/norm_geometry.hpp"

using namespace rlw;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

Mesh load_obj(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  return read_obj(is);
}

// Merges coincident vertices (the duplicated seam ring) and returns V - E + F.
int welded_euler(const Mesh& mesh) {
  std::map<std::tuple<long long, long long, long long>, int> ids;
  std::vector<int> remap;
  for (const auto& v : mesh.vertices) {
    const auto key = std::make_tuple(std::llround(v.x() * 1e9), std::llround(v.y() * 1e9), std::llround(v.z() * 1e9));
    remap.push_back(ids.emplace(key, int(ids.size())).first->second);
  }
  std::set<std::pair<int, int>> edges;
  int faces = 0;
  for (const auto& f : mesh.faces) {
    const int a = remap[f[0]], b = remap[f[1]], c = remap[f[2]];
    if (a == b || b == c || a == c) continue;
    ++faces;
    for (auto [x, y] : {std::pair{a, b}, std::pair{b, c}, std::pair{c, a}}) edges.emplace(std::min(x, y), std::max(x, y));
  }
  return int(ids.size()) - int(edges.size()) + faces;
}

// Positive for a closed mesh with outward-facing triangles.
double signed_volume(const Mesh& mesh) {
  double v = 0.0;
  for (const auto& f : mesh.faces)
    v += mesh.vertices[f[0]].dot(mesh.vertices[f[1]].cross(mesh.vertices[f[2]])) / 6.0;
  return v;
}

int poles(const Mesh& mesh) {
  int n = 0;
  for (const auto& v : mesh.vertices)
    if (v.x() == 0.0 && v.y() == 0.0) ++n;
  return n;
}

}  // namespace

TEST_CASE("classify examples") {
  auto r = run({"classify", "--m", "2", "--lambda", "0.5", "--mu", "0", "--c2", "1"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("5i-1, domain (1, ∞)", 0) == 0);
  r = run({"classify", "--m", "2", "--lambda", "1", "--mu", "-1", "--c1", "0.2"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("6.3ii-2, domain (0.225403, 1.7746)", 0) == 0);
  r = run({"classify", "--m", "2", "--lambda", "1", "--mu", "-1", "--c1", "0.6"});
  CHECK(r.code == 2);
  CHECK(r.err.find("lambda^lambda/(lambda+1)") != std::string::npos);
}

TEST_CASE("classify json") {
  const auto r = run({"classify", "--lambda", "1/2", "--mu", "0", "--c2", "1", "--json"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["schema_version"] == 1);
  CHECK(j["kind"] == "classification");
  REQUIRE(j["intervals"].size() == 1);
  CHECK(j["intervals"][0]["case_tag"] == "5i-1");
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == 1);
  CHECK(run({"classify", "--sign", "2", "--lambda", "1/2", "--c2", "1"}).code == 1);
  CHECK(run({"classify", "--lambda", "1/0"}).code == 1);
  CHECK(run({"generate", "--recipe", "C42"}).code == 1);
}

TEST_CASE("generate then verify reproduces the table residual") {
  struct Job {
    std::vector<std::string> args;
    double tol;
  };
  const Job jobs[] = {
      {{"--m", "2", "--form", "k2-const", "--mu", "-1"}, 1e-8},
      {{"--m", "3", "--form", "k2-const", "--mu", "-1"}, 1e-8},
      {{"--m", "2", "--lambda", "0.5", "--mu", "0", "--c2", "1"}, 1e-6},
      {{"--m", "2", "--lambda", "1", "--mu", "-1", "--c1", "0.2"}, 1e-6},
      {{"--m", "3", "--lambda", "-0.5", "--mu", "1", "--c1", "1"}, 1e-6},
  };
  for (const auto& job : jobs) {
    std::vector<std::string> gen = {"generate", "--csv", "rt.csv", "--meta", "rt.json"};
    gen.insert(gen.end(), job.args.begin(), job.args.end());
    REQUIRE(run(gen).code == 0);
    const json meta = json::parse(slurp("rt.json"));
    std::vector<std::string> ver = {"verify", "--profile", "rt.csv", "--report", "rt_report.json"};
    ver.insert(ver.end(), job.args.begin(), job.args.end());
    const auto r = run(ver);
    CHECK(r.code == 0);
    const json rep = json::parse(slurp("rt_report.json"));
    const double a = meta["table_residual"]["residual_max"], b = rep["residual_max"];
    CHECK(std::abs(a - b) <= 1e-12);
    CHECK(b < job.tol);
    CHECK(meta["table_residual"]["evaluated"] == rep["evaluated"]);
  }
}

TEST_CASE("verify exit codes") {
  REQUIRE(run({"generate", "--lambda", "0.5", "--mu", "0", "--c2", "1", "--csv", "bad.csv"}).code == 0);
  // passes at 1e-6, fails at a tolerance below the residual
  CHECK(run({"verify", "--profile", "bad.csv", "--lambda", "0.5", "--mu", "0"}).code == 0);
  CHECK(run({"verify", "--profile", "bad.csv", "--lambda", "0.5", "--mu", "0", "--tol", "1e-15"}).code == 1);
  std::string text = slurp("bad.csv");
  const auto line = text.find('\n', text.find('\n') + 1) + 1;
  const auto comma = text.find(',', line);
  text.replace(comma + 1, text.find(',', comma + 1) - comma - 1, "x1.5");
  std::ofstream("bad.csv", std::ios::binary) << text;
  const auto r = run({"verify", "--profile", "bad.csv", "--lambda", "0.5", "--mu", "0"});
  CHECK(r.code == 3);
  CHECK(run({"verify", "--profile", "missing.csv"}).code == 3);
  std::ofstream("bad.csv", std::ios::binary) << "alpha,u\n1,2\n";
  CHECK(run({"verify", "--profile", "bad.csv"}).code == 3);
}

TEST_CASE("verify without a profile checks the solved branch") {
  const auto r = run({"verify", "--lambda", "-1.5", "--mu", "0", "--c2", "1"});
  CHECK(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["case_tag"] == "5ii");
  CHECK(j["passed"] == true);
  CHECK(j["oracle"]["checked"] == true);
  CHECK(!j["axis_limits"].is_null());
  for (const char* key : {"schema_version", "kind", "branch_id", "epsilon", "tol", "residual_max", "residual_rms",
                          "evaluated", "excluded_zones", "first_integral_drift", "warnings"})
    CHECK(j.contains(key));
}

TEST_CASE("outputs are deterministic") {
  const std::vector<std::string> base = {"--lambda", "-1", "--mu", "1", "--c1", "1.5", "--recipe", "C3"};
  auto gen = [&](const std::string& tag) {
    std::vector<std::string> a = {"generate", "--csv", tag + ".csv", "--meta", tag + ".json", "--obj", tag + ".obj",
                                  "--segments", "16"};
    a.insert(a.end(), base.begin(), base.end());
    REQUIRE(run(a).code == 0);
  };
  gen("det_a");
  gen("det_b");
  for (const char* ext : {".csv", ".json", ".obj"}) {
    const std::string a = slurp(std::string("det_a") + ext), b = slurp(std::string("det_b") + ext);
    CHECK(!a.empty());
    CHECK(a == b);
  }
  const json meta = json::parse(slurp("det_a.json"));
  CHECK(meta["surface"]["topology"] == "PeriodicTube");
  CHECK(meta["surface"]["d_values"].size() == 2);
}

TEST_CASE("sphere mesh lies on the unit sphere of the norm") {
  for (int m : {2, 3}) {
    REQUIRE(run({"generate", "--m", std::to_string(m), "--form", "k2-const", "--mu", "-1", "--obj", "sphere.obj",
                 "--segments", "32"})
                .code == 0);
    const Mesh mesh = load_obj("sphere.obj");
    REQUIRE(!mesh.vertices.empty());
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& v : mesh.vertices) {
      lo = std::min(lo, v.z());
      hi = std::max(hi, v.z());
    }
    const Eigen::Vector3d c(0, 0, 0.5 * (lo + hi));
    double worst = 0.0;
    for (const auto& v : mesh.vertices)
      worst = std::max(worst, std::abs(std::pow(phi(NormParameter(m), Eigen::Vector3d(v - c)), 1.0 / (2 * m)) - 1.0));
    CHECK(worst < 1e-6);
    CHECK(poles(mesh) == 2);
    CHECK(welded_euler(mesh) == 2);
    CHECK(signed_volume(mesh) > 0.0);
  }
}

TEST_CASE("torus mesh is closed with Euler characteristic 0") {
  REQUIRE(run({"generate", "--form", "k1-const", "--mu", "1", "--c1", "2", "--recipe", "Torus4iii", "--obj", "torus.obj",
               "--segments", "24", "--meta", "torus.json"})
              .code == 0);
  const Mesh mesh = load_obj("torus.obj");
  CHECK(poles(mesh) == 0);
  CHECK(welded_euler(mesh) == 0);
  CHECK(signed_volume(mesh) > 0.0);
  const json meta = json::parse(slurp("torus.json"));
  CHECK(meta["surface"]["topology"] == "Torus");
}

TEST_CASE("5ii mesh has two poles") {
  REQUIRE(run({"generate", "--lambda", "-1.5", "--mu", "0", "--c2", "1", "--obj", "p.obj", "--segments", "24"}).code == 0);
  const Mesh mesh = load_obj("p.obj");
  CHECK(poles(mesh) == 2);
  CHECK(welded_euler(mesh) == 2);
}

TEST_CASE("config file with flag precedence") {
  std::ofstream("job.cfg") << "# job\nm = 2\nlambda = 0.5\nmu = 0\nc2 = 1\n";
  auto r = run({"classify", "--config", "job.cfg"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("5i-1", 0) == 0);
  r = run({"classify", "--config", "job.cfg", "--lambda", "1", "--mu", "-1", "--c1", "0.2"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("6.3ii-2", 0) == 0);
}

TEST_CASE("scan-coincidence emits a table") {
  const auto r = run({"scan-coincidence", "--recipe", "C3", "--lambda", "-1", "--mu", "1", "--from", "1.2", "--to", "2",
                      "--steps", "3"});
  CHECK(r.code == 0);
  std::istringstream is(r.out);
  std::string line;
  std::getline(is, line);
  CHECK(line == "c1,d_first,d_second,difference,near_coincidence");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 3);
  CHECK(r.out.find("Torus") == std::string::npos);
  CHECK(run({"scan-coincidence", "--recipe", "Torus4iii"}).code == 1);
}

TEST_CASE("log level from the environment") {
  const std::vector<std::string> args = {"classify", "--lambda", "-1", "--mu", "-1", "--c1", "1"};
  setenv("SPDLOG_LEVEL", "off", 1);
  auto r = run(args);
  CHECK(r.code == 0);
  CHECK(r.err.empty());
  unsetenv("SPDLOG_LEVEL");
  r = run(args);
  CHECK(r.err.find("[warning]") != std::string::npos);
}
