// SPDX-License-Identifier: Apache-2.0

// Runs the command-line tool as a subprocess. YAMABE_TOOL holds its path.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "yamabe_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Run run(const std::string& args) {
  const char* tool = std::getenv("YAMABE_TOOL");
  REQUIRE(tool != nullptr);
  const fs::path capture = fs::temp_directory_path() / "yamabe_cli_test" / "stdout.txt";
  fs::create_directories(capture.parent_path());
  const std::string cmd = std::string("\"") + tool + "\" " + args + " > \"" + capture.string() + "\" 2>&1";
  const int raw = std::system(cmd.c_str());
  Run r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(capture);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

Json read_json(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  return Json::parse(in);
}

Json without_timestamps(Json j) {
  if (j.is_object()) {
    j.erase("generated_at");
    for (auto& [k, v] : j.items()) v = without_timestamps(v);
  } else if (j.is_array()) {
    for (auto& v : j) v = without_timestamps(v);
  }
  return j;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST_CASE("constants") {
  const auto dir = scratch("constants");
  const auto r = run("constants --n 2 --delta 1 --yamabe --out " + dir.string());
  CHECK(r.status == 0);
  const auto j = read_json(dir / "constants.json");
  CHECK(j["yamabe"]["p"].get<double>() == doctest::Approx(4.0));
  CHECK(j["yamabe"]["lambda"].get<double>() == doctest::Approx(2.0 / 3.0));
  CHECK(j["constants"]["mu"].get<double>() == doctest::Approx(1.0 / 3.0));
  CHECK(j["bifurcation"][0]["lambda_k"].get<double>() == doctest::Approx(2.0));

  const auto p3 = run("constants --n 2 --delta 1 --p 3 --lambda 12.6 --out " + dir.string());
  CHECK(p3.status == 0);
  const auto j3 = read_json(dir / "constants.json");
  CHECK(j3["bifurcation"][0]["lambda_k"].get<double>() == doctest::Approx(4.0));
  CHECK(j3["bifurcation"][1]["lambda_k"].get<double>() == doctest::Approx(12.0));
  CHECK(j3["bifurcation"][2]["lambda_k"].get<double>() == doctest::Approx(24.0));
}

TEST_CASE("invalid parameters exit with status 2") {
  const auto dir = scratch("invalid");
  const auto r = run("constants --n 2 --delta 1 --p 2 --out " + dir.string());
  CHECK(r.status == 2);
  CHECK(r.out.find("invalid-parameter") != std::string::npos);
  CHECK(run("constants --n 1 --delta 1 --yamabe --out " + dir.string()).status == 2);
  CHECK(run("constants --n 2 --delta 1 --yamabe --p 4 --out " + dir.string()).status == 2);
  CHECK(run("shoot --n 2 --delta 1 --yamabe --out " + dir.string()).status == 2);
  CHECK(run("verify " + (dir / "missing.csv").string() + " --out " + dir.string()).status == 2);
}

TEST_CASE("nodal catalog is deterministic") {
  const auto a = scratch("nodal_a");
  const auto b = scratch("nodal_b");
  CHECK(run("nodal --n 2 --delta 1 --yamabe --k-max 3 --out " + a.string()).status == 0);
  CHECK(run("nodal --n 2 --delta 1 --yamabe --k-max 3 --out " + b.string()).status == 0);
  auto ja = without_timestamps(read_json(a / "catalog.json"));
  auto jb = without_timestamps(read_json(b / "catalog.json"));
  ja["config"].erase("output_dir");
  jb["config"].erase("output_dir");
  CHECK(ja == jb);
  for (int k = 1; k <= 3; ++k) {
    const std::string name = "nodal_k" + std::to_string(k) + ".csv";
    auto body = [](const std::string& s) { return s.substr(s.find('\n')); };
    CHECK(body(slurp(a / name)) == body(slurp(b / name)));
  }
  const auto& entries = ja["catalog"]["entries"];
  REQUIRE(entries.size() == 3);
  CHECK(entries[0]["alpha"].get<double>() == doctest::Approx(3.80888888711).epsilon(1e-9));
}

TEST_CASE("empty catalog") {
  const auto dir = scratch("nodal_empty");
  CHECK(run("nodal --n 2 --delta 1 --yamabe --k-max 0 --out " + dir.string()).status == 0);
  CHECK(read_json(dir / "catalog.json")["catalog"]["entries"].empty());
}

TEST_CASE("eigen") {
  const auto dir = scratch("eigen");
  CHECK(run("eigen --n 3 --k-max 6 --out " + dir.string()).status == 0);
  const auto j = read_json(dir / "eigen.json");
  CHECK(j["pass"] == true);
  CHECK(j["polynomials"].size() == 6);
}

TEST_CASE("bifurcate rejects a critical exponent") {
  const auto dir = scratch("bif_critical");
  const auto r = run("bifurcate --n 2 --delta 1 --p 4 --k 1 --out " + dir.string());
  CHECK(r.status == 2);
  CHECK(r.out.find("subcritical") != std::string::npos);
}

TEST_CASE("bifurcate traces a branch and verifies solutions") {
  const auto dir = scratch("bif");
  const auto r = run("bifurcate --n 2 --delta 1 --p 3 --k 1 --lambda-ceiling 12 --at-lambda 6 --out " + dir.string());
  CHECK(r.status == 0);
  const auto j = read_json(dir / "branch_k1_plus.json");
  CHECK(j["branch"]["points"].size() >= 20);
  CHECK(fs::exists(dir / "diagram.csv"));
  const auto b = read_json(dir / "bifurcation.json");
  CHECK(b["solutions_at"]["count"].get<int>() == 2);
  CHECK(fs::exists(dir / "solution_0.csv"));
  CHECK(run("verify " + (dir / "solution_0.csv").string() + " --out " + dir.string()).status == 0);
}

TEST_CASE("verify") {
  const auto dir = scratch("verify");
  REQUIRE(run("nodal --n 2 --delta 1 --yamabe --k-max 2 --out " + dir.string()).status == 0);
  const auto good = run("verify " + (dir / "nodal_k2.csv").string() + " --samples 100 --out " + dir.string());
  CHECK(good.status == 0);
  const auto report = read_json(dir / "verify_report.json");
  CHECK(report["pass"] == true);
  CHECK(report["checks"]["ode"]["sup_residual"].get<double>() <= 1e-6);
  CHECK(report["checks"].contains("t_equation"));

  // Perturb one interior value of w.
  std::istringstream in(slurp(dir / "nodal_k2.csv"));
  std::ostringstream corrupted;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    if (row == 500) {
      const auto c1 = line.find(',');
      const auto c2 = line.find(',', c1 + 1);
      const double w = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
      std::ostringstream num;
      num.precision(17);
      num << w + 1e-3;
      line = line.substr(0, c1 + 1) + num.str() + line.substr(c2);
    }
    corrupted << line << "\n";
    ++row;
  }
  std::ofstream(dir / "corrupted.csv") << corrupted.str();
  const auto bad = run("verify --input " + (dir / "corrupted.csv").string() + " --out " + dir.string());
  CHECK(bad.status == 1);
  const auto bad_report = read_json(dir / "verify_report.json");
  CHECK(bad_report["pass"] == false);
  CHECK(bad_report["checks"]["ode"]["sup_residual"].get<double>() > 1e-3);

  std::ofstream(dir / "garbage.csv") << "# {}\nr,w\n";
  CHECK(run("verify " + (dir / "garbage.csv").string() + " --out " + dir.string()).status == 2);
}

TEST_CASE("trivial solution file passes verification") {
  const auto dir = scratch("trivial");
  REQUIRE(run("shoot --n 2 --delta 1 --yamabe --alpha 1 --out " + dir.string()).status == 0);
  CHECK(run("verify " + (dir / "shot.csv").string() + " --out " + dir.string()).status == 0);
  CHECK(read_json(dir / "verify_report.json")["checks"]["ode"]["sup_residual"].get<double>() <= 1e-10);
}

TEST_CASE("flags override the config file") {
  const auto dir = scratch("config");
  std::ofstream(dir / "cfg.json") << R"({"n": 3, "delta": 2.0, "p": 3.0, "k_max": 2})";
  CHECK(run("constants --config " + (dir / "cfg.json").string() + " --k-max 4 --out " + dir.string()).status == 0);
  const auto j = read_json(dir / "constants.json");
  CHECK(j["config"]["n"] == 3);
  CHECK(j["config"]["k_max"] == 4);
  CHECK(j["bifurcation"].size() == 4);

  std::ofstream(dir / "bad.json") << R"({"colour": "blue"})";
  CHECK(run("constants --config " + (dir / "bad.json").string() + " --out " + dir.string()).status == 2);
}

TEST_CASE("format selection and output directory from the environment") {
  const auto dir = scratch("formats");
  CHECK(run("shoot --n 2 --delta 1 --yamabe --alpha 3 --format csv --out " + dir.string()).status == 0);
  CHECK(fs::exists(dir / "shot.csv"));
  CHECK_FALSE(fs::exists(dir / "shot.json"));
  CHECK_FALSE(fs::exists(dir / "shot.svgpath"));

  const auto env_dir = scratch("env");
  const std::string cmd = "YAMABE_OUT_DIR=" + env_dir.string() + " ";
  const char* tool = std::getenv("YAMABE_TOOL");
  REQUIRE(tool);
  CHECK(std::system((cmd + "\"" + tool + "\" shoot --n 2 --delta 1 --yamabe --alpha 3 > /dev/null").c_str()) == 0);
  CHECK(fs::exists(env_dir / "shot.json"));
}
