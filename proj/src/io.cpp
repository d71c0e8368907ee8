// SPDX-License-Identifier: Apache-2.0

#include "yamabe/io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <numbers>
#include <sstream>

#include "yamabe/error.hpp"

namespace yamabe {

namespace {

template <class T>
void set_from(const Json& v, T& field) {
  field = v.get<T>();
}

template <class T>
void set_optional(const Json& v, std::optional<T>& field) {
  if (v.is_null()) field.reset();
  else field = v.get<T>();
}

template <class T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_number(const std::string& cell, std::size_t line) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  while (end && (*end == ' ' || *end == '\r')) ++end;
  if (end == begin || *end != '\0' || !std::isfinite(v)) {
    std::ostringstream os;
    os << "line " << line << ": '" << cell << "' is not a finite number";
    throw Error(ErrorKind::MalformedInput, os.str());
  }
  return v;
}

void malformed(const std::string& what) { throw Error(ErrorKind::MalformedInput, what); }

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

} // namespace

bool RunConfig::wants(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

ProblemParams problem_params(const RunConfig& c) {
  if (c.yamabe) {
    auto params = yamabe_problem(c.n, c.delta);
    if (c.p || c.lambda)
      throw Error(ErrorKind::InvalidParameter, "--yamabe fixes p and lambda; do not pass them");
    return params;
  }
  if (!c.p) throw Error(ErrorKind::InvalidParameter, "p is required unless --yamabe is given");
  if (!c.lambda) throw Error(ErrorKind::InvalidParameter, "lambda is required unless --yamabe is given");
  ProblemParams params{c.n, c.delta, *c.p, *c.lambda};
  validate(params);
  return params;
}

Json to_json(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  j["n"] = c.n;
  j["delta"] = c.delta;
  j["p"] = optional_json(c.p);
  j["lambda"] = optional_json(c.lambda);
  j["yamabe"] = c.yamabe;
  j["k_max"] = c.k_max;
  j["k"] = optional_json(c.k);
  j["alpha"] = optional_json(c.alpha);
  j["alpha_max"] = c.alpha_max;
  j["resolution"] = c.resolution;
  j["eps_start"] = c.integrator.eps_start;
  j["rel_tol"] = c.integrator.rel_tol;
  j["abs_tol"] = c.integrator.abs_tol;
  j["max_steps"] = c.integrator.max_steps;
  j["output_intervals"] = c.integrator.output_intervals;
  j["grid_n"] = c.grid_n;
  j["seed_t"] = c.continuation.seed_t;
  j["ds_initial"] = c.continuation.ds_initial;
  j["ds_min"] = c.continuation.ds_min;
  j["ds_max"] = c.continuation.ds_max;
  j["lambda_ceiling"] = c.continuation.lambda_ceiling;
  j["lambda_floor"] = c.continuation.lambda_floor;
  j["max_points"] = c.continuation.max_points;
  j["newton_tol"] = c.continuation.newton_tol;
  j["at_lambda"] = optional_json(c.at_lambda);
  j["samples"] = c.samples;
  j["fd_h"] = c.fd_h;
  j["seed"] = c.seed;
  j["ode_tol"] = c.ode_tol;
  j["input"] = c.input;
  j["output_dir"] = c.output_dir;
  j["formats"] = c.formats;
  return j;
}

void apply_json(RunConfig& c, const Json& j) {
  if (!j.is_object()) malformed("config must be a JSON object");
  using Setter = std::function<void(const Json&)>;
  const std::map<std::string, Setter> setters{
      {"command", [&](const Json& v) { set_from(v, c.command); }},
      {"n", [&](const Json& v) { set_from(v, c.n); }},
      {"delta", [&](const Json& v) { set_from(v, c.delta); }},
      {"p", [&](const Json& v) { set_optional(v, c.p); }},
      {"lambda", [&](const Json& v) { set_optional(v, c.lambda); }},
      {"yamabe", [&](const Json& v) { set_from(v, c.yamabe); }},
      {"k_max", [&](const Json& v) { set_from(v, c.k_max); }},
      {"k", [&](const Json& v) { set_optional(v, c.k); }},
      {"alpha", [&](const Json& v) { set_optional(v, c.alpha); }},
      {"alpha_max", [&](const Json& v) { set_from(v, c.alpha_max); }},
      {"resolution", [&](const Json& v) { set_from(v, c.resolution); }},
      {"eps_start", [&](const Json& v) { set_from(v, c.integrator.eps_start); }},
      {"rel_tol", [&](const Json& v) { set_from(v, c.integrator.rel_tol); }},
      {"abs_tol", [&](const Json& v) { set_from(v, c.integrator.abs_tol); }},
      {"max_steps", [&](const Json& v) { set_from(v, c.integrator.max_steps); }},
      {"output_intervals", [&](const Json& v) { set_from(v, c.integrator.output_intervals); }},
      {"grid_n", [&](const Json& v) { set_from(v, c.grid_n); }},
      {"seed_t", [&](const Json& v) { set_from(v, c.continuation.seed_t); }},
      {"ds_initial", [&](const Json& v) { set_from(v, c.continuation.ds_initial); }},
      {"ds_min", [&](const Json& v) { set_from(v, c.continuation.ds_min); }},
      {"ds_max", [&](const Json& v) { set_from(v, c.continuation.ds_max); }},
      {"lambda_ceiling", [&](const Json& v) { set_from(v, c.continuation.lambda_ceiling); }},
      {"lambda_floor", [&](const Json& v) { set_from(v, c.continuation.lambda_floor); }},
      {"max_points", [&](const Json& v) { set_from(v, c.continuation.max_points); }},
      {"newton_tol", [&](const Json& v) { set_from(v, c.continuation.newton_tol); }},
      {"at_lambda", [&](const Json& v) { set_optional(v, c.at_lambda); }},
      {"samples", [&](const Json& v) { set_from(v, c.samples); }},
      {"fd_h", [&](const Json& v) { set_from(v, c.fd_h); }},
      {"seed", [&](const Json& v) { set_from(v, c.seed); }},
      {"ode_tol", [&](const Json& v) { set_from(v, c.ode_tol); }},
      {"input", [&](const Json& v) { set_from(v, c.input); }},
      {"output_dir", [&](const Json& v) { set_from(v, c.output_dir); }},
      {"formats", [&](const Json& v) { set_from(v, c.formats); }},
  };
  for (const auto& [key, value] : j.items()) {
    const auto it = setters.find(key);
    if (it == setters.end()) malformed("unknown config key '" + key + "'");
    try {
      it->second(value);
    } catch (const nlohmann::json::exception& e) {
      malformed("config key '" + key + "': " + e.what());
    }
  }
}

RunConfig load_config_file(const std::filesystem::path& path) {
  RunConfig c;
  Json j;
  try {
    j = Json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    malformed(path.string() + ": " + e.what());
  }
  apply_json(c, j);
  return c;
}

Json output_header(const RunConfig& config, const std::string& kind) {
  Json h;
  h["schema_version"] = kSchemaVersion;
  h["kind"] = kind;
  h["generated_at"] = timestamp_utc();
  h["config"] = to_json(config);
  try {
    const auto params = problem_params(config);
    h["params"] = to_json(params);
    h["constants"] = to_json(derive_constants(params));
  } catch (const Error&) {
    h["params"] = nullptr;
    h["constants"] = nullptr;
  }
  return h;
}

Json strip_timestamp(Json j) {
  if (j.is_object()) {
    j.erase("generated_at");
    for (auto& [key, value] : j.items()) value = strip_timestamp(value);
  } else if (j.is_array()) {
    for (auto& value : j) value = strip_timestamp(value);
  }
  return j;
}

Json to_json(const ProblemParams& p) {
  return {{"n", p.n}, {"delta", p.delta}, {"p", p.p}, {"lambda", p.lambda}};
}

Json to_json(const DerivedConstants& c) {
  return {{"mu", c.mu},
          {"a2n", c.a2n},
          {"p2n", c.p2n},
          {"scal", c.scal},
          {"alpha_threshold", c.alpha_threshold}};
}

Json to_json(const ResidualReport& r) {
  Json j{{"sup_residual", r.sup_residual},
         {"mean_residual", r.mean_residual},
         {"sample", r.sample},
         {"samples", r.samples},
         {"equation_sup", r.equation_sup},
         {"consistency_sup", r.consistency_sup}};
  j["sup_residual_half"] = optional_json(r.sup_residual_half);
  j["slope"] = optional_json(r.slope);
  return j;
}

Json to_json(const NodalSolution& s) {
  return {{"k", s.k},
          {"alpha", s.alpha},
          {"symmetry", to_string(s.symmetry)},
          {"zeros_half", s.zeros_half},
          {"sign_changes", count_sign_changes(s.trajectory.w)},
          {"midpoint_residual", s.residuals.midpoint},
          {"boundary_slope", s.residuals.boundary_slope},
          {"ode_sup_residual", s.residuals.ode_sup},
          {"certified", s.certified}};
}

Json to_json(const NodalCatalog& c) {
  Json entries = Json::array();
  for (const auto& e : c.entries) entries.push_back(to_json(e));
  Json bands = Json::array();
  for (const auto& b : c.scan.bands) bands.push_back({{"lo", b.lo}, {"hi", b.hi}, {"count", b.count}});
  return {{"params", to_json(c.params)},
          {"complete", c.complete},
          {"missing", c.missing},
          {"alpha_max", c.alpha_max},
          {"resolution", c.resolution},
          {"midpoint_tol", c.options.midpoint_tol},
          {"ode_tol", c.options.ode_tol},
          {"scan_note", c.scan.note},
          {"bands", bands},
          {"entries", entries}};
}

Json to_json(const Branch& b) {
  Json points = Json::array();
  for (const auto& pt : b.points)
    points.push_back({{"lambda", pt.lambda},
                      {"amplitude", pt.amplitude},
                      {"t", pt.t},
                      {"sign_changes", pt.sign_changes},
                      {"positive", pt.solution.positive},
                      {"residual_norm", pt.solution.residual_norm},
                      {"u_0", pt.solution.u[0]},
                      {"u_pi", pt.solution.u[pt.solution.u.size() - 1]},
                      {"newton_iterations", pt.solution.iterations}});
  return {{"k", b.k}, {"direction", b.direction}, {"termination", b.termination}, {"points", points}};
}

Json to_json(const EigenPoly& poly) {
  Json exact = Json::array();
  for (const auto& c : poly.exact) exact.push_back(c.str());
  return {{"n", poly.n}, {"k", poly.k}, {"beta", beta(poly.n, poly.k)},
          {"coefficients", poly.coeffs}, {"coefficients_exact", exact}};
}

Json to_json(const RootReport& r) {
  return {{"count", r.count}, {"roots", r.roots}, {"slopes", r.slopes}, {"all_simple", r.all_simple}};
}

std::string trajectory_csv(const Trajectory& t, const Json& header) {
  std::ostringstream os;
  os << "# " << header.dump() << "\n";
  os << "r,w,wp,E\n";
  const bool has_energy = t.energy.size() == t.size();
  for (std::size_t i = 0; i < t.size(); ++i) {
    os << fmt(t.grid[i]) << ',' << fmt(t.w[i]) << ',' << fmt(t.wp[i]) << ','
       << (has_energy ? fmt(t.energy[i]) : std::string("nan")) << "\n";
  }
  return os.str();
}

std::string profile_csv(const BvpGrid& grid, const Eigen::VectorXd& u, const Json& header) {
  std::ostringstream os;
  os << "# " << header.dump() << "\n";
  os << "r,u\n";
  for (int i = 0; i < grid.size(); ++i) os << fmt(grid.node(i)) << ',' << fmt(u[i]) << "\n";
  return os.str();
}

std::string svg_path(const std::vector<double>& x, const std::vector<double>& y) {
  std::ostringstream os;
  os << std::setprecision(6);
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i)
    os << (i == 0 ? "M " : " L ") << x[i] << ' ' << y[i];
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidParameter, "cannot write " + path.string());
  out << content;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) malformed("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

LoadedSolution parse_solution(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0)
    malformed("missing '# {json}' header line");
  LoadedSolution out;
  try {
    out.header = Json::parse(line.substr(2));
    const auto& p = out.header.at("params");
    out.params = {p.at("n").get<int>(), p.at("delta").get<double>(), p.at("p").get<double>(),
                  p.at("lambda").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    malformed(std::string("bad header: ") + e.what());
  }
  try {
    validate(out.params);
  } catch (const Error& e) {
    malformed(std::string("bad header parameters: ") + e.what());
  }

  if (!std::getline(is, line)) malformed("missing column line");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto columns = split(line, ',');
  const bool trajectory = columns.size() >= 3 && columns[0] == "r" && columns[1] == "w" && columns[2] == "wp";
  const bool profile = columns.size() == 2 && columns[0] == "r" && columns[1] == "u";
  if (!trajectory && !profile) malformed("columns must be r,w,wp[,E] or r,u; got '" + line + "'");

  std::vector<std::vector<double>> cols(columns.size());
  std::size_t number = 2;
  while (std::getline(is, line)) {
    ++number;
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line, ',');
    if (cells.size() != columns.size()) {
      std::ostringstream os;
      os << "line " << number << ": expected " << columns.size() << " fields, got " << cells.size();
      malformed(os.str());
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      // The energy column may be absent (written as nan).
      if (trajectory && c == 3 && cells[c] == "nan") {
        cols[c].push_back(std::nan(""));
        continue;
      }
      cols[c].push_back(parse_number(cells[c], number));
    }
  }
  const auto& r = cols[0];
  if (r.size() < 17) malformed("need at least 17 samples");
  if (r.front() != 0.0) malformed("grid must start at r = 0");
  for (std::size_t i = 1; i < r.size(); ++i)
    if (!(r[i] > r[i - 1])) malformed("grid must be strictly increasing");

  if (trajectory) {
    const double end = r.back();
    if (std::abs(end - std::numbers::pi / 2) > 1e-12 && std::abs(end - std::numbers::pi) > 1e-12)
      malformed("trajectory grid must end at pi/2 or pi");
    out.trajectory.grid = r;
    out.trajectory.w = cols[1];
    out.trajectory.wp = cols[2];
    out.trajectory.alpha = cols[1].front();
    out.trajectory.params = out.params;
    return out;
  }

  const int N = static_cast<int>(r.size()) - 1;
  if (N < 50) malformed("profile grid needs N >= 50");
  const double h = std::numbers::pi / N;
  for (int i = 0; i <= N; ++i)
    if (std::abs(r[i] - i * h) > 1e-9) malformed("profile grid must be uniform on [0, pi]");
  out.discrete = true;
  out.grid = make_grid(N, out.params.n, out.params.delta, out.params.p);
  out.solution.u = Eigen::Map<const Eigen::VectorXd>(cols[1].data(), N + 1);
  out.solution.lambda = out.params.lambda;
  out.solution.residual_norm = residual_norm(out.grid, bvp_residual(out.grid, out.solution.u, out.params.lambda));
  out.solution.positive = out.solution.u.minCoeff() > 0;
  out.solution.trivial = (out.solution.u.array() - 1.0).abs().maxCoeff() <= 1e-8;
  return out;
}

} // namespace yamabe
