// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "yamabe/bifurcation.hpp"
#include "yamabe/eigenfunctions.hpp"
#include "yamabe/error.hpp"
#include "yamabe/io.hpp"
#include "yamabe/nodal_search.hpp"
#include "yamabe/params.hpp"
#include "yamabe/shooter.hpp"
#include "yamabe/verify.hpp"

namespace fs = std::filesystem;
using namespace yamabe;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitError = 2;

/// Flags recorded as JSON so they can be layered over a config file.
class FlagSet {
public:
  template <class T>
  CLI::Option* add(CLI::App& app, const std::string& names, const std::string& key,
                   const std::string& help) {
    auto holder = std::make_shared<T>();
    CLI::Option* opt = app.add_option(names, *holder, help);
    items_.push_back({opt, [holder, key](Json& j) { j[key] = *holder; }});
    return opt;
  }

  CLI::Option* add_flag(CLI::App& app, const std::string& names, const std::string& key,
                        const std::string& help) {
    CLI::Option* opt = app.add_flag(names, help);
    items_.push_back({opt, [key](Json& j) { j[key] = true; }});
    return opt;
  }

  Json given() const {
    Json j = Json::object();
    for (const auto& [opt, store] : items_)
      if (opt->count() > 0) store(j);
    return j;
  }

private:
  std::vector<std::pair<CLI::Option*, std::function<void(Json&)>>> items_;
};

void add_problem_flags(CLI::App& app, FlagSet& f) {
  f.add<int>(app, "--n", "n", "sphere dimension (>= 2)");
  f.add<double>(app, "--delta", "delta", "scale of the second factor");
  f.add<double>(app, "--p", "p", "exponent in (2, 2n/(n-1)]");
  f.add<double>(app, "--lambda", "lambda", "lambda > 0");
  f.add_flag(app, "--yamabe", "yamabe", "use the Yamabe values of p and lambda");
}

void add_integrator_flags(CLI::App& app, FlagSet& f) {
  f.add<double>(app, "--eps-start", "eps_start", "startup offset from r = 0");
  f.add<double>(app, "--rel-tol", "rel_tol", "integrator relative tolerance");
  f.add<double>(app, "--abs-tol", "abs_tol", "integrator absolute tolerance");
  f.add<long>(app, "--max-steps", "max_steps", "integrator step budget");
  f.add<int>(app, "--output-intervals", "output_intervals", "samples on [0, pi/2]");
}

void add_output_flags(CLI::App& app, FlagSet& f) {
  f.add<std::string>(app, "--out", "output_dir", "output directory (default $YAMABE_OUT_DIR or ./yamabe-out)");
  f.add<std::vector<std::string>>(app, "--format", "formats", "json, csv, svg-data (repeatable)")
      ->check(CLI::IsMember({"json", "csv", "svg-data"}));
}

fs::path output_dir(const RunConfig& c) {
  if (!c.output_dir.empty()) return c.output_dir;
  if (const char* env = std::getenv("YAMABE_OUT_DIR"); env && *env) return env;
  return "yamabe-out";
}

struct Output {
  const RunConfig& config;
  fs::path dir;

  void json(const std::string& name, const Json& j) const {
    if (config.wants("json")) write_text(dir / name, j.dump(2) + "\n");
  }
  void csv(const std::string& name, const std::string& text) const {
    if (config.wants("csv")) write_text(dir / name, text);
  }
  void svg(const std::string& name, const std::string& path) const {
    if (config.wants("svg-data")) write_text(dir / name, path + "\n");
  }
};

int cmd_constants(const RunConfig& c, const Output& out) {
  Json j = output_header(c, "constants");
  const auto y = yamabe_parameters(c.n, c.delta);
  j["yamabe"] = {{"lambda", y.lambda}, {"p", y.p}};
  std::optional<double> p = c.yamabe ? std::optional<double>(y.p) : c.p;
  if (p) {
    // Range check of p on its own; λ does not enter it.
    validate(ProblemParams{c.n, c.delta, *p, 1.0});
    Json table = Json::array();
    for (int k = 1; k <= c.k_max; ++k)
      table.push_back({{"k", k}, {"beta", beta(c.n, k)}, {"lambda_k", bifurcation_lambda(c.n, k, c.delta, *p)}});
    j["bifurcation"] = table;
  }
  if (c.yamabe || c.lambda) {
    const auto params = problem_params(c);
    j["params"] = to_json(params);
    j["constants"] = to_json(derive_constants(params));
  }
  out.json("constants.json", j);
  std::cout << j.dump(2) << "\n";
  return kExitPass;
}

int cmd_shoot(const RunConfig& c, const Output& out) {
  if (!c.alpha) throw Error(ErrorKind::InvalidParameter, "shoot needs --alpha");
  const auto params = problem_params(c);
  const auto shot = integrate_half(params, c.integrator, *c.alpha);
  const auto energy = energy_profile(shot.trajectory);
  double worst_increase = 0;
  for (std::size_t i = 1; i < energy.energy.size(); ++i)
    worst_increase = std::max(worst_increase, energy.energy[i] - energy.energy[i - 1]);

  Json j = output_header(c, "shot");
  j["alpha"] = shot.alpha;
  j["zeros_half"] = shot.zeros_half;
  j["zeros"] = shot.zeros;
  j["ambiguous_zero"] = shot.ambiguous_zero;
  j["w_mid"] = shot.w_mid;
  j["wp_mid"] = shot.wp_mid;
  j["energy_initial"] = energy.initial;
  j["energy_mid"] = energy.energy.back();
  j["energy_max_increase"] = worst_increase;
  j["steps_accepted"] = shot.stats.accepted;
  j["steps_rejected"] = shot.stats.rejected;
  out.json("shot.json", j);
  out.csv("shot.csv", trajectory_csv(shot.trajectory, output_header(c, "trajectory")));
  out.svg("shot.svgpath", svg_path(shot.trajectory.grid, shot.trajectory.w));
  std::cout << j.dump(2) << "\n";
  return kExitPass;
}

int cmd_nodal(const RunConfig& c, const Output& out) {
  const auto params = problem_params(c);
  CatalogOptions options;
  options.alpha_max = c.alpha_max;
  options.initial_resolution = c.resolution;
  options.ode_tol = c.ode_tol;
  const auto catalog = build_catalog(params, c.integrator, c.k_max, options);

  Json j = output_header(c, "nodal-catalog");
  j["catalog"] = to_json(catalog);
  for (const auto& e : catalog.entries) {
    const std::string stem = "nodal_k" + std::to_string(e.k);
    Json h = output_header(c, "trajectory");
    h["k"] = e.k;
    h["alpha"] = e.alpha;
    out.csv(stem + ".csv", trajectory_csv(e.trajectory, h));
    out.svg(stem + ".svgpath", svg_path(e.trajectory.grid, e.trajectory.w));
  }
  out.json("catalog.json", j);
  std::cout << j.dump(2) << "\n";
  if (!catalog.complete) {
    std::cerr << "catalog incomplete; missing k:";
    for (int k : catalog.missing) std::cerr << ' ' << k;
    std::cerr << "\n";
    return kExitFail;
  }
  return kExitPass;
}

int cmd_eigen(const RunConfig& c, const Output& out) {
  if (c.n < 2) throw Error(ErrorKind::InvalidParameter, "n must be at least 2");
  Json j = output_header(c, "eigenfunctions");
  Json polys = Json::array();
  bool ok = true;
  for (int k = 1; k <= c.k_max; ++k) {
    const auto poly = eigenpoly(c.n, k);
    const auto image = apply_H<Rational>(c.n, Rational(beta(c.n, k)), poly.exact);
    const bool annihilated = std::all_of(image.begin(), image.end(), [](const Rational& v) { return v == 0; });
    const auto roots = zero_count(poly);
    const auto parity = endpoint_parity(poly);
    const bool pass = annihilated && roots.count == k && roots.all_simple &&
                      std::abs(poly(0.0) - 1.0) <= 1e-14 &&
                      std::abs(parity.w_pi - (k % 2 ? -1.0 : 1.0)) <= 1e-14;
    ok = ok && pass;
    Json entry = to_json(poly);
    entry["annihilated_exactly"] = annihilated;
    entry["roots"] = to_json(roots);
    entry["symmetry"] = to_string(parity.symmetry);
    entry["w_pi"] = parity.w_pi;
    entry["pass"] = pass;
    polys.push_back(entry);

    std::vector<double> r, w;
    const int samples = 512;
    for (int i = 0; i <= samples; ++i) {
      r.push_back(std::numbers::pi * i / samples);
      w.push_back(poly(r.back()));
    }
    std::ostringstream csv;
    csv << "# " << output_header(c, "eigenfunction").dump() << "\nr,w\n" << std::setprecision(17);
    for (std::size_t i = 0; i < r.size(); ++i) csv << r[i] << ',' << w[i] << "\n";
    out.csv("eigen_k" + std::to_string(k) + ".csv", csv.str());
    out.svg("eigen_k" + std::to_string(k) + ".svgpath", svg_path(r, w));
  }
  Json interlace = Json::array();
  for (int m = 1; m <= c.k_max; ++m)
    for (int l = m + 1; l <= c.k_max; ++l) {
      const auto rep = sturm_interlace(c.n, m, l);
      ok = ok && rep.holds;
      interlace.push_back({{"m", m}, {"l", l}, {"holds", rep.holds}, {"gaps_checked", rep.gaps_checked}});
    }
  j["polynomials"] = polys;
  j["interlacing"] = interlace;
  j["pass"] = ok;
  out.json("eigen.json", j);
  std::cout << j.dump(2) << "\n";
  return ok ? kExitPass : kExitFail;
}

Json verify_discrete_json(const DiscreteSolution& s, const BvpGrid& grid, const RunConfig& c, bool& pass) {
  const auto v = verify_discrete(s, grid, c.integrator, c.ode_tol);
  const bool discrete_ok = s.residual_norm <= c.continuation.newton_tol;
  pass = v.passed && discrete_ok;
  return {{"discrete_residual", s.residual_norm},
          {"discrete_tolerance", c.continuation.newton_tol},
          {"distance_to_shooting", v.distance_to_shooting},
          {"shooting_residual", to_json(v.shooting_residual)},
          {"pass", pass}};
}

int cmd_bifurcate(const RunConfig& c, const Output& out) {
  if (!c.p && !c.yamabe) throw Error(ErrorKind::InvalidParameter, "bifurcate needs --p");
  const double p = c.yamabe ? critical_exponent(c.n) : *c.p;
  validate(ProblemParams{c.n, c.delta, p, 1.0});
  if (!(p < critical_exponent(c.n)))
    throw Error(ErrorKind::InvalidParameter,
                "bifurcate needs a subcritical exponent; p must be below " +
                    Json(critical_exponent(c.n)).dump());
  const auto grid = make_grid(c.grid_n, c.n, c.delta, p);

  std::vector<int> ks;
  if (c.k) ks.push_back(*c.k);
  else
    for (int k = 1; k <= c.k_max; ++k) ks.push_back(k);

  Json j = output_header(c, "bifurcation");
  Json branches = Json::array();
  Json errors = Json::array();
  std::ostringstream diagram;
  diagram << "# " << output_header(c, "bifurcation-diagram").dump() << "\n";
  diagram << "k,direction,lambda,amplitude,sign_changes,positive\n" << std::setprecision(17);
  bool ok = true;
  for (int k : ks) {
    for (int dir : {1, -1}) {
      const std::string stem = "branch_k" + std::to_string(k) + (dir > 0 ? "_plus" : "_minus");
      try {
        const auto br = branch_from(k, grid, c.continuation, dir);
        Json bj = output_header(c, "branch");
        bj["lambda_k"] = bifurcation_lambda(c.n, k, c.delta, p);
        bj["branch"] = to_json(br);
        out.json(stem + ".json", bj);
        std::vector<double> lam, amp;
        for (const auto& pt : br.points) {
          diagram << k << ',' << dir << ',' << pt.lambda << ',' << pt.amplitude << ','
                  << pt.sign_changes << ',' << (pt.solution.positive ? 1 : 0) << "\n";
          lam.push_back(pt.lambda);
          amp.push_back(pt.amplitude);
        }
        out.svg(stem + ".svgpath", svg_path(lam, amp));
        branches.push_back({{"k", k}, {"direction", dir}, {"points", br.points.size()},
                            {"termination", br.termination}, {"file", stem + ".json"}});
      } catch (const Error& e) {
        ok = false;
        errors.push_back({{"k", k}, {"direction", dir}, {"error", e.what()}});
      }
    }
  }
  out.csv("diagram.csv", diagram.str());
  j["branches"] = branches;
  j["errors"] = errors;

  if (c.at_lambda) {
    const int k_max = c.k ? *c.k : c.k_max;
    const auto rep = solutions_at(*c.at_lambda, grid, k_max, c.continuation);
    Json sols = Json::array();
    int index = 0;
    for (const auto& s : rep.solutions) {
      bool pass = false;
      Json sj{{"k", s.k}, {"direction", s.direction}, {"sign_changes", s.sign_changes},
              {"u_0", s.solution.u[0]}, {"u_pi", s.solution.u[grid.N]},
              {"min", s.solution.u.minCoeff()}};
      sj["verify"] = verify_discrete_json(s.solution, grid, c, pass);
      ok = ok && pass;
      const std::string name = "solution_" + std::to_string(index++) + ".csv";
      RunConfig echo = c;
      echo.lambda = *c.at_lambda;
      echo.p = p;
      echo.yamabe = false;
      out.csv(name, profile_csv(grid, s.solution.u, output_header(echo, "profile")));
      sj["file"] = name;
      sols.push_back(sj);
    }
    for (const auto& e : rep.errors) {
      ok = false;
      j["errors"].push_back({{"error", e}});
    }
    j["solutions_at"] = {{"lambda", *c.at_lambda}, {"count", rep.solutions.size()}, {"solutions", sols}};
  }
  j["pass"] = ok;
  out.json("bifurcation.json", j);
  std::cout << j.dump(2) << "\n";
  return ok ? kExitPass : kExitFail;
}

int cmd_verify(const RunConfig& c, const Output& out) {
  if (c.input.empty()) throw Error(ErrorKind::InvalidParameter, "verify needs an input file");
  const auto loaded = parse_solution(read_text(c.input));
  Json j = output_header(c, "verify-report");
  j["input"] = c.input;
  j["params"] = to_json(loaded.params);
  bool pass = false;
  if (loaded.discrete) {
    j["solution_kind"] = "profile";
    j["checks"] = verify_discrete_json(loaded.solution, loaded.grid, c, pass);
  } else {
    j["solution_kind"] = "trajectory";
    const auto ode = ode_residual(loaded.trajectory);
    pass = ode.sup_residual <= c.ode_tol;
    Json checks{{"ode", to_json(ode)}, {"ode_tolerance", c.ode_tol}};
    // The t-equation and the product-manifold check need the whole of [0, π].
    if (std::abs(loaded.trajectory.grid.back() - std::numbers::pi) < 1e-12) {
      const auto phi = phi_from_profile(Profile::from_trajectory(loaded.trajectory));
      checks["t_equation"] = to_json(t_equation_residual(phi, loaded.params));
      checks["product_manifold"] =
          to_json(pde_residual_sampled(phi.value, loaded.params, c.samples, c.fd_h, c.seed));
    }
    checks["pass"] = pass;
    j["checks"] = checks;
  }
  j["pass"] = pass;
  out.json("verify_report.json", j);
  std::cout << j.dump(2) << "\n";
  return pass ? kExitPass : kExitFail;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nodal and positive solutions of the Yamabe-type equation on S^n x S^n"};
  app.require_subcommand(1);
  std::string config_path;

  struct Command {
    CLI::App* app;
    FlagSet flags;
    std::function<int(const RunConfig&, const Output&)> run;
  };
  std::vector<std::unique_ptr<Command>> commands;
  auto make = [&](const std::string& name, const std::string& help, auto run) -> Command& {
    auto cmd = std::make_unique<Command>();
    cmd->app = app.add_subcommand(name, help);
    cmd->app->add_option("--config", config_path, "JSON config file; flags take precedence");
    cmd->run = run;
    add_output_flags(*cmd->app, cmd->flags);
    commands.push_back(std::move(cmd));
    return *commands.back();
  };

  auto& constants = make("constants", "derived constants and bifurcation values", cmd_constants);
  add_problem_flags(*constants.app, constants.flags);
  constants.flags.add<int>(*constants.app, "--k-max", "k_max", "largest k in the table");

  auto& shoot = make("shoot", "single shot from w(0) = alpha to pi/2", cmd_shoot);
  add_problem_flags(*shoot.app, shoot.flags);
  add_integrator_flags(*shoot.app, shoot.flags);
  shoot.flags.add<double>(*shoot.app, "--alpha", "alpha", "initial value w(0)");

  auto& nodal = make("nodal", "catalog of nodal solutions with k = 1..k_max zeros", cmd_nodal);
  add_problem_flags(*nodal.app, nodal.flags);
  add_integrator_flags(*nodal.app, nodal.flags);
  nodal.flags.add<int>(*nodal.app, "--k-max", "k_max", "largest zero count");
  nodal.flags.add<double>(*nodal.app, "--alpha-max", "alpha_max", "scan limit (0: adaptive)");
  nodal.flags.add<int>(*nodal.app, "--resolution", "resolution", "initial scan resolution");
  nodal.flags.add<double>(*nodal.app, "--ode-tol", "ode_tol", "certification residual tolerance");

  auto& eigen = make("eigen", "eigenpolynomials, zero counts and interlacing", cmd_eigen);
  eigen.flags.add<int>(*eigen.app, "--n", "n", "sphere dimension (>= 2)");
  eigen.flags.add<int>(*eigen.app, "--k-max", "k_max", "largest degree");

  auto& bif = make("bifurcate", "branches of positive solutions from u = 1", cmd_bifurcate);
  add_problem_flags(*bif.app, bif.flags);
  add_integrator_flags(*bif.app, bif.flags);
  bif.flags.add<int>(*bif.app, "--k", "k", "single bifurcation index");
  bif.flags.add<int>(*bif.app, "--k-max", "k_max", "trace k = 1..k_max");
  bif.flags.add<int>(*bif.app, "--grid-n", "grid_n", "grid intervals N");
  bif.flags.add<double>(*bif.app, "--lambda-ceiling", "lambda_ceiling", "stop above this lambda");
  bif.flags.add<double>(*bif.app, "--lambda-floor", "lambda_floor", "stop below this lambda");
  bif.flags.add<double>(*bif.app, "--ds-max", "ds_max", "largest arclength step");
  bif.flags.add<int>(*bif.app, "--max-points", "max_points", "point budget per branch");
  bif.flags.add<double>(*bif.app, "--at-lambda", "at_lambda", "collect distinct solutions at this lambda");
  bif.flags.add<double>(*bif.app, "--ode-tol", "ode_tol", "verification residual tolerance");

  auto& ver = make("verify", "residual checks for a solution file", cmd_verify);
  add_integrator_flags(*ver.app, ver.flags);
  ver.flags.add<std::string>(*ver.app, "input,--input", "input", "trajectory or profile CSV");
  ver.flags.add<int>(*ver.app, "--samples", "samples", "random product points");
  ver.flags.add<double>(*ver.app, "--fd-h", "fd_h", "geodesic finite-difference step");
  ver.flags.add<std::uint64_t>(*ver.app, "--seed", "seed", "sampling seed");
  ver.flags.add<double>(*ver.app, "--ode-tol", "ode_tol", "residual tolerance");
  ver.flags.add<double>(*ver.app, "--newton-tol", "newton_tol", "discrete residual tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  for (const auto& cmd : commands) {
    if (!cmd->app->parsed()) continue;
    try {
      RunConfig config = config_path.empty() ? RunConfig{} : load_config_file(config_path);
      apply_json(config, cmd->flags.given());
      config.command = cmd->app->get_name();
      const Output out{config, output_dir(config)};
      return cmd->run(config, out);
    } catch (const Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitError;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitError;
    }
  }
  return kExitError;
}
