// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>

#include "yamabe/error.hpp"
#include "yamabe/io.hpp"

using namespace yamabe;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an exception");
  return ErrorKind::InvalidParameter;
}

std::string flat_trajectory_file() {
  RunConfig cfg;
  cfg.command = "shoot";
  cfg.n = 2;
  cfg.delta = 1.0;
  cfg.yamabe = true;
  const auto shot = integrate_half(problem_params(cfg), IntegratorConfig{}, 1.0);
  return trajectory_csv(extend_by_symmetry(shot, Symmetry::Even), output_header(cfg, "trajectory"));
}

} // namespace

TEST_CASE("config round trip") {
  RunConfig cfg;
  cfg.command = "bifurcate";
  cfg.n = 3;
  cfg.delta = 0.5;
  cfg.p = 3.5;
  cfg.k = 2;
  cfg.grid_n = 800;
  cfg.continuation.ds_max = 0.05;
  cfg.integrator.rel_tol = 1e-11;
  cfg.at_lambda = 40.0;
  cfg.formats = {"json"};
  const Json j = to_json(cfg);
  RunConfig back;
  apply_json(back, j);
  CHECK(to_json(back) == j);
  CHECK(back.p == 3.5);
  CHECK_FALSE(back.lambda.has_value());
  CHECK(back.wants("json"));
  CHECK_FALSE(back.wants("csv"));
}

TEST_CASE("config errors") {
  RunConfig cfg;
  CHECK(kind_of([&] { apply_json(cfg, Json{{"no_such_key", 1}}); }) == ErrorKind::MalformedInput);
  CHECK(kind_of([&] { apply_json(cfg, Json{{"n", "two"}}); }) == ErrorKind::MalformedInput);
  CHECK(kind_of([&] { apply_json(cfg, Json::array()); }) == ErrorKind::MalformedInput);

  RunConfig both;
  both.n = 2;
  both.delta = 1.0;
  both.yamabe = true;
  both.p = 4.0;
  CHECK(kind_of([&] { problem_params(both); }) == ErrorKind::InvalidParameter);

  RunConfig yamabe_case;
  yamabe_case.n = 2;
  yamabe_case.delta = 1.0;
  yamabe_case.yamabe = true;
  const auto params = problem_params(yamabe_case);
  CHECK(params.p == doctest::Approx(4.0));
  CHECK(params.lambda == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("config file") {
  const auto dir = std::filesystem::temp_directory_path() / "yamabe_io_test";
  write_text(dir / "cfg.json", R"({"n": 4, "delta": 2.0, "k_max": 3})");
  const auto cfg = load_config_file(dir / "cfg.json");
  CHECK(cfg.n == 4);
  CHECK(cfg.delta == 2.0);
  CHECK(cfg.k_max == 3);
  write_text(dir / "bad.json", "{ not json");
  CHECK(kind_of([&] { load_config_file(dir / "bad.json"); }) == ErrorKind::MalformedInput);
  CHECK_THROWS_AS(load_config_file(dir / "missing.json"), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("header and timestamp") {
  RunConfig cfg;
  cfg.command = "constants";
  cfg.yamabe = true;
  const auto h = output_header(cfg, "constants");
  CHECK(h["schema_version"] == kSchemaVersion);
  CHECK(h["kind"] == "constants");
  CHECK(h.contains("generated_at"));
  CHECK_FALSE(strip_timestamp(h).contains("generated_at"));
}

TEST_CASE("trajectory CSV round trip") {
  const std::string text = flat_trajectory_file();
  CHECK(text.rfind("# {", 0) == 0);
  const auto loaded = parse_solution(text);
  CHECK_FALSE(loaded.discrete);
  CHECK(loaded.params.n == 2);
  CHECK(loaded.trajectory.size() == 2 * 2048 + 1);
  CHECK(loaded.trajectory.grid.back() == doctest::Approx(std::numbers::pi).epsilon(1e-15));
  for (double w : loaded.trajectory.w) CHECK(w == 1.0);
}

TEST_CASE("profile CSV round trip") {
  RunConfig cfg;
  cfg.command = "bifurcate";
  cfg.n = 2;
  cfg.delta = 1.0;
  cfg.p = 3.0;
  cfg.lambda = 12.6;
  const auto grid = make_grid(100, 2, 1.0, 3.0);
  Eigen::VectorXd u(grid.size());
  for (int i = 0; i < grid.size(); ++i) u[i] = 1.0 + 0.25 * std::cos(grid.node(i));
  const auto loaded = parse_solution(profile_csv(grid, u, output_header(cfg, "profile")));
  CHECK(loaded.discrete);
  CHECK(loaded.grid.N == 100);
  CHECK(loaded.solution.lambda == 12.6);
  CHECK((loaded.solution.u - u).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("malformed solution files") {
  const std::string good = flat_trajectory_file();
  const auto first_newline = good.find('\n');
  const std::string header = good.substr(0, first_newline);
  const std::string body = good.substr(first_newline + 1);

  auto rejects = [](const std::string& text) {
    return kind_of([&] { parse_solution(text); }) == ErrorKind::MalformedInput;
  };
  CHECK(rejects(""));
  CHECK(rejects(body));                                   // no header
  CHECK(rejects("# {broken\n" + body));                   // header not JSON
  CHECK(rejects(header + "\nr,w\n0,1\n"));                // unknown columns
  CHECK(rejects(header + "\nr,w,wp,E\n0,1,0,0\n0.1,1,0,0\n"));  // too short
  std::string nan = good;
  nan.replace(nan.find("\n0,") + 3, 1, "nan");
  CHECK(rejects(nan));
  // Out-of-order radii.
  std::istringstream in(body);
  std::string line, swapped = header + "\n";
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  std::swap(rows[5], rows[6]);
  for (const auto& r : rows) swapped += r + "\n";
  CHECK(rejects(swapped));
}

TEST_CASE("svg path") {
  CHECK(svg_path({0, 1}, {2, 3}) == "M 0 2 L 1 3");
  CHECK(svg_path({}, {}).empty());
}
