// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "yamabe/bifurcation.hpp"
#include "yamabe/eigenfunctions.hpp"
#include "yamabe/nodal_search.hpp"
#include "yamabe/shooter.hpp"
#include "yamabe/verify.hpp"

namespace yamabe {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Everything a run depends on. Echoed into every file the run writes.
struct RunConfig {
  std::string command;
  int n = 2;
  double delta = 1.0;
  std::optional<double> p;
  std::optional<double> lambda;
  bool yamabe = false;

  int k_max = 5;
  std::optional<int> k;
  std::optional<double> alpha;
  double alpha_max = 0;  // 0: adaptive
  int resolution = 200;
  IntegratorConfig integrator;

  int grid_n = 400;
  ContinuationConfig continuation;
  std::optional<double> at_lambda;

  int samples = 1000;
  double fd_h = 1e-3;
  std::uint64_t seed = 20240607;
  double ode_tol = 1e-6;
  std::string input;

  std::string output_dir;
  std::vector<std::string> formats{"json", "csv", "svg-data"};

  bool wants(const std::string& format) const;
};

/// Resolves the yamabe flag. Throws Error(InvalidParameter) when p or λ is
/// missing.
ProblemParams problem_params(const RunConfig& config);

Json to_json(const RunConfig& config);
/// Overwrites the fields present in `j`. Throws Error(MalformedInput) on
/// unknown keys or wrongly typed values.
void apply_json(RunConfig& config, const Json& j);
RunConfig load_config_file(const std::filesystem::path& path);

/// Common header of every output: schema version, timestamp, config echo
/// and derived constants when the problem is fully specified.
Json output_header(const RunConfig& config, const std::string& kind);

/// `generated_at` is the only field that differs between identical runs.
Json strip_timestamp(Json j);

Json to_json(const ProblemParams& p);
Json to_json(const DerivedConstants& c);
Json to_json(const ResidualReport& r);
Json to_json(const NodalSolution& s);
Json to_json(const NodalCatalog& c);
Json to_json(const Branch& b);
Json to_json(const EigenPoly& poly);
Json to_json(const RootReport& r);

std::string trajectory_csv(const Trajectory& t, const Json& header);
std::string profile_csv(const BvpGrid& grid, const Eigen::VectorXd& u, const Json& header);
/// "M x0 y0 L x1 y1 …" in data coordinates.
std::string svg_path(const std::vector<double>& x, const std::vector<double>& y);

void write_text(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

/// A solution file read back for verification.
struct LoadedSolution {
  Json header;
  ProblemParams params;
  bool discrete = false;
  Trajectory trajectory;  // when !discrete
  BvpGrid grid;           // when discrete
  DiscreteSolution solution;
};

/// Parses a trajectory CSV (columns r,w,wp[,E]) or a profile CSV (r,u) with
/// a "# {json}" header line. Throws Error(MalformedInput).
LoadedSolution parse_solution(const std::string& text);

} // namespace yamabe
