#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>

#include "json.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using skt::test::data_path;
using skt::test::read_text;

namespace {

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("sktcrn_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Run run(const std::string& args) {
  const fs::path err_file = scratch("stderr") / "err.txt";
  const std::string cmd = std::string(SKTCRN_PATH) + " " + args + " 2> " + err_file.string();
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = ::pclose(pipe);
  r.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = read_text(err_file);
  return r;
}

nlohmann::json error_line(const Run& r) {
  REQUIRE(!r.err.empty());
  const auto last = r.err.find_last_of('\n', r.err.size() - 2);
  return nlohmann::json::parse(r.err.substr(last == std::string::npos ? 0 : last + 1));
}

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

/// Copy of a data config with its network path made absolute and extra text appended.
fs::path config_copy(const std::string& name, const std::string& extra, const fs::path& dir) {
  std::string text = read_text(data_path(name));
  const std::string key = "network = ";
  const auto pos = text.find(key);
  text.insert(pos + key.size(), data_path("").string());
  const fs::path out = dir / name;
  std::ofstream(out) << text << extra;
  return out;
}

}  // namespace

TEST_CASE("analyze S1 <-> S2") {
  const auto r = run("analyze " + quote(data_path("corpus/isomer.crn")));
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["m"] == 1);
  CHECK(j["deficiency"] == 0);
  CHECK(j["weakly_reversible"] == true);
  for (const auto& v : j["u_star"]) CHECK(v.get<double>() > 0.0);
  for (const char* key : {"species", "Q", "c", "ell", "s", "u_infinity", "residual", "boundary_faces"}) {
    CHECK(j.contains(key));
  }
  // default mass Q 1 = 2 with k1 = 1, k2 = 2: u_inf = (4/3, 2/3)
  CHECK(j["u_infinity"][0].get<double>() == doctest::Approx(4.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("analyze with an explicit mass") {
  const auto r = run("analyze " + quote(data_path("corpus/association.crn")) + " --mass 2,2");
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  for (const auto& v : j["u_infinity"]) CHECK(v.get<double>() == doctest::Approx(1.0).epsilon(1e-10));
  for (const auto& f : j["boundary_faces"]) CHECK(f["mass_feasible"] == false);
}

TEST_CASE("equilibrium for a mass vector") {
  const auto r = run("equilibrium " + quote(data_path("corpus/isomer.crn")) + " --mass 3");
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["u_infinity"][0].get<double>() == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(j["u_infinity"][1].get<double>() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("equilibrium with an unreachable mass exits with status 2") {
  const auto r = run("equilibrium " + quote(data_path("corpus/isomer.crn")) + " --mass -1");
  CHECK(r.status == 2);
  CHECK(error_line(r)["error"] == "MassNotReachable");
  const auto wrong_size = run("equilibrium " + quote(data_path("corpus/isomer.crn")) + " --mass 1,2");
  CHECK(wrong_size.status == 2);
}

TEST_CASE("parse errors exit with status 1 and name the line") {
  const auto r = run("analyze " + quote(data_path("malformed/negative_rate.crn")));
  CHECK(r.status == 1);
  const auto j = error_line(r);
  CHECK(j["error"] == "ParseError");
  CHECK(j["message"].get<std::string>().rfind("line 2:", 0) == 0);
  CHECK(run("equilibrium " + quote(data_path("corpus/isomer.crn")) + " --mass x").status == 1);
  CHECK(run("frobnicate").status == 1);
}

TEST_CASE("network without complex balance exits with status 2") {
  CHECK(run("analyze " + quote(data_path("corpus/irreversible.crn"))).status == 2);
  const auto r = run("check " + quote(data_path("irreversible.cfg")));
  CHECK(r.status == 2);
  CHECK(error_line(r)["error"] == "NoComplexBalance");
}

TEST_CASE("failing diffusion conditions exit with status 3") {
  const auto r = run("check " + quote(data_path("bad_diffusion.cfg")));
  CHECK(r.status == 3);
  CHECK(error_line(r)["error"] == "NeitherConditionHolds");
}

TEST_CASE("check reports the structural gates") {
  const auto r = run("check " + quote(data_path("isomer_step.cfg")));
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["condition"] == "detailed_balance");
  CHECK(j["boundary_faces"].empty());
}

TEST_CASE("simulate from the equilibrium: zero entropy audit") {
  const auto out = scratch("equilibrium_run");
  const auto r = run("simulate " + quote(data_path("at_equilibrium.cfg")) + " --out " + quote(out));
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(read_text(out / "summary.json"));
  CHECK(j["entropy_audit"].get<double>() <= 1e-12);
  CHECK(j["lambda_est"].is_null());
  CHECK(j["dissipation_ratio"].is_null());
  CHECK(fs::exists(out / "trajectory.csv"));
}

TEST_CASE("simulate is byte-reproducible and leaves no temporaries") {
  const auto a = scratch("run_a"), b = scratch("run_b");
  REQUIRE(run("simulate " + quote(data_path("isomer_step.cfg")) + " --out " + quote(a) + " --seed 3").status == 0);
  REQUIRE(run("simulate " + quote(data_path("isomer_step.cfg")) + " --out " + quote(b) + " --seed 3").status == 0);
  CHECK(read_text(a / "trajectory.csv") == read_text(b / "trajectory.csv"));
  CHECK(read_text(a / "summary.json") == read_text(b / "summary.json"));
  CHECK(std::distance(fs::directory_iterator(a), fs::directory_iterator()) == 2);
}

TEST_CASE("solver failure exits with status 4 without partial artifacts") {
  const auto dir = scratch("solver_failure");
  const auto cfg = config_copy("isomer_step.cfg", "\n[solver]\nnewton_tol = 1e-300\nnewton_max_iter = 2\n", dir);
  const auto out = dir / "out";
  const auto r = run("simulate " + quote(cfg) + " --out " + quote(out));
  CHECK(r.status == 4);
  CHECK(error_line(r)["error"] == "StepFailed");
  CHECK_FALSE(fs::exists(out / "trajectory.csv"));
  CHECK_FALSE(fs::exists(out / "summary.json"));
}
