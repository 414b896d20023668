// Command-line front end: steady-state profiles, the critical-mass table,
// time evolution from a config file, and the built-in verification suite.
// Exit codes: 0 ok, 1 usage/config, 2 regime nonexistence, 3 solver failure,
// 4 verification failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "radstar/driver.hpp"
#include "radstar/io.hpp"
#include "radstar/selfsimilar.hpp"
#include "radstar/steady_star.hpp"
#include "radstar/verify.hpp"

namespace fs = std::filesystem;
using namespace radstar;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRegime = 2;
constexpr int kExitSolver = 3;
constexpr int kExitVerify = 4;

double get_num(const std::map<std::string, std::string>& kv, const std::string& key,
               double fallback) {
  const auto it = kv.find(key);
  return it == kv.end() ? fallback : std::stod(it->second);
}

std::string get_str(const std::map<std::string, std::string>& kv, const std::string& key,
                    const std::string& fallback) {
  const auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second;
}

int cmd_steady(double K, double epsilon, std::optional<double> mass,
               std::optional<double> central_density, double entropy, double u0,
               std::size_t n_grid, const std::string& out_dir) {
  StarParams p;
  p.K = K;
  p.epsilon = epsilon;
  if (!regime_exists(classify_regime(p))) {
    std::fprintf(stderr, "no steady state exists for epsilon*K = %g\n", p.epsK());
    return kExitRegime;
  }
  SteadyProfile prof;
  if (mass) {
    prof = solve_for_mass(p, *mass, n_grid);
  } else if (central_density) {
    // with S fixed at 1, rho_c = u0^alpha_eps picks the central value
    const DerivedExponents d = derived_exponents(p, 1.0);
    prof = build_steady_profile(p, 1.0, std::pow(*central_density, 1.0 / d.alpha_eps),
                                n_grid);
  } else {
    prof = build_steady_profile(p, entropy, u0, n_grid);
  }

  fs::create_directories(out_dir);
  const std::string csv = (fs::path(out_dir) / "profile.csv").string();
  const std::string hdr = (fs::path(out_dir) / "profile.json").string();
  write_csv(profile_table(prof), csv);
  write_profile_header(prof, hdr);

  const BoundaryFit fit = fit_boundary_exponents(prof);
  std::printf("R = %.12g\n", prof.R);
  std::printf("mass_tilde = %.12g\n", prof.mass_tilde);
  std::printf("M = %.12g\n", prof.total_mass_4pi());
  std::printf("S = %.12g\n", prof.exponents.S);
  std::printf("boundary: rho ~ sigma^%.4f, theta_slope_at_R = %.6g, theta/sigma -> %.6g\n",
              fit.rho_exponent, fit.theta_slope_at_R, fit.theta_over_sigma_limit);

  RunManifest man;
  man.command = "steady";
  man.config = {{"K", format_double(K)},
                {"epsilon", format_double(epsilon)},
                {"entropy", format_double(prof.exponents.S)},
                {"u0", format_double(prof.u[0])},
                {"n_grid", std::to_string(n_grid)}};
  man.summary = {{"R", format_double(prof.R)},
                 {"mass_tilde", format_double(prof.mass_tilde)},
                 {"M", format_double(prof.total_mass_4pi())}};
  man.outputs = {"profile.csv", "profile.json"};
  write_manifest(man, (fs::path(out_dir) / "manifest.json").string());
  return kExitOk;
}

int cmd_critical_mass(const std::vector<double>& ktilde) {
  std::printf("%-12s %-18s\n", "K_tilde", "M_c");
  for (double kt : ktilde) std::printf("%-12g %-18.12g\n", kt, critical_mass(kt));
  return kExitOk;
}

int cmd_evolve(const std::string& config_path, const std::string& out_dir) {
  const auto kv = parse_config_file(config_path);

  StarParams p;
  p.K = get_num(kv, "K", 1.0);
  p.epsilon = get_num(kv, "epsilon", 0.5);
  p.c_nu = get_num(kv, "c_nu", 1.0);
  p.mu = get_num(kv, "mu", 0.0);
  p.lambda_visc = get_num(kv, "lambda", 0.0);
  p.iota = static_cast<int>(get_num(kv, "iota", p.mu > 0.0 ? 1.0 : 0.0));

  EvolveConfig cfg;
  cfg.params = p;
  cfg.cfl = get_num(kv, "cfl", 0.4);
  cfg.t_end = get_num(kv, "t_end", 1.0);
  cfg.snapshot_every = get_num(kv, "snapshot_every", 0.0);
  cfg.theta_floor = get_num(kv, "theta_floor", 0.0);
  cfg.implicit_solver_tol = get_num(kv, "implicit_solver_tol", 1e-12);
  cfg.dt_max = get_num(kv, "dt_max", 1.0);

  const std::size_t n = static_cast<std::size_t>(get_num(kv, "n", 256));
  const std::string initial = get_str(kv, "initial", "steady");

  LagrangianGrid grid;
  LagrangianState state;
  if (initial == "steady") {
    const double S = get_num(kv, "entropy", 1.0);
    const double u0 = get_num(kv, "u0", 1.0);
    const SteadyProfile prof = build_steady_profile(p, S, u0, 4096);
    grid = build_grid(prof, n);
    state = init_from_steady(prof, [](double) { return 0.0; }, grid);
  } else if (initial == "selfsimilar") {
    SelfSimilarSolution sol;
    sol.base = build_steady_profile(p, get_num(kv, "entropy", 1.0 / std::sqrt(2.0)),
                                    get_num(kv, "u0", 1.0), 4096);
    sol.a = get_num(kv, "a", 1.0);
    sol.b = get_num(kv, "b", 0.0);
    grid = build_grid(sol, n);
    state = exact_state(sol, grid, 0.0);
  } else if (initial == "custom") {
    // snapshot-format CSV: kind 0 rows (x, r, v), kind 1 rows (x, rho0, Theta)
    const CsvTable t = read_csv(get_str(kv, "initial_csv", ""));
    std::vector<double> xc, rho0, theta, r, v;
    for (const auto& row : t.rows) {
      if (row[0] == 0.0) {
        r.push_back(row[2]);
        v.push_back(row[3]);
      } else {
        xc.push_back(row[1]);
        rho0.push_back(row[2]);
        theta.push_back(row[3]);
      }
    }
    if (xc.size() < 8 || r.size() != xc.size() + 1)
      throw DomainError("custom initial data: malformed snapshot CSV");
    const double dx = xc[1] - xc[0];
    grid = build_grid(
        [&](double x) {
          // piecewise-linear in the cell samples, clamped at the ends
          if (x <= xc.front()) return rho0.front();
          if (x >= xc.back()) return rho0.back();
          const std::size_t i =
              std::min(static_cast<std::size_t>((x - xc.front()) / dx),
                       xc.size() - 2);
          const double w = (x - xc[i]) / dx;
          return (1.0 - w) * rho0[i] + w * rho0[i + 1];
        },
        xc.back() + 0.5 * dx, xc.size());
    state.t = 0.0;
    state.r_face = r;
    state.v_face = v;
    state.Theta_cell = theta;
  } else {
    std::fprintf(stderr, "unknown initial-data selector '%s'\n", initial.c_str());
    return kExitUsage;
  }

  const RunResult res = run(cfg, grid, std::move(state));

  fs::create_directories(out_dir);
  RunManifest man;
  man.command = "evolve";
  for (const auto& [k, v] : kv) man.config[k] = v;
  for (std::size_t k = 0; k < res.trajectory.snapshots.size(); ++k) {
    const std::string name = "snapshot_" + std::to_string(k) + ".csv";
    write_csv(snapshot_table(res.trajectory.snapshots[k], grid),
              (fs::path(out_dir) / name).string());
    man.outputs.push_back(name);
  }
  write_csv(diagnostics_table(res.reports), (fs::path(out_dir) / "diagnostics.csv").string());
  man.outputs.push_back("diagnostics.csv");
  man.summary = {{"snapshots", std::to_string(res.trajectory.snapshots.size())},
                 {"final_t", format_double(res.trajectory.times.empty()
                                               ? 0.0
                                               : res.trajectory.times.back())},
                 {"final_boundary_radius",
                  format_double(res.trajectory.snapshots.empty()
                                    ? 0.0
                                    : res.trajectory.snapshots.back().r_face.back())}};
  man.status = res.trajectory.completed ? "ok" : res.trajectory.error_message;
  write_manifest(man, (fs::path(out_dir) / "manifest.json").string());

  if (!res.trajectory.completed) {
    std::fprintf(stderr, "run halted: %s (partial outputs in %s)\n",
                 res.trajectory.error_message.c_str(), out_dir.c_str());
    return kExitSolver;
  }
  std::printf("completed t = %.12g, boundary radius = %.12g, %zu snapshots\n",
              res.trajectory.times.back(),
              res.trajectory.snapshots.back().r_face.back(),
              res.trajectory.snapshots.size());
  return kExitOk;
}

int cmd_verify(bool quick, const std::string& workdir) {
  const auto results = radstar::verify::run_suite(quick, workdir);
  int fails = 0;
  for (const auto& r : results) {
    std::printf("[%s] %2d  %s\n        %s\n", r.passed ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.detail.c_str());
    if (!r.passed) ++fails;
  }
  std::printf("%zu checks, %d failed\n", results.size(), fails);
  return fails == 0 ? kExitOk : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"radiational star toolkit"};
  app.require_subcommand(1);

  // steady
  auto* steady = app.add_subcommand("steady", "compute a steady-state profile");
  double K = 1.0, epsilon = 0.5, entropy = 1.0, u0 = 1.0;
  std::optional<double> mass, central_density;
  std::size_t n_grid = 4096;
  std::string out_dir = "out";
  steady->add_option("--K", K, "pressure constant")->required();
  steady->add_option("--epsilon", epsilon, "heating rate")->required();
  steady->add_option("--mass", mass, "target total mass M");
  steady->add_option("--central-density", central_density, "target rho(0)");
  steady->add_option("--entropy", entropy, "entropy constant S");
  steady->add_option("--u0", u0, "central value of the reduced variable");
  steady->add_option("--n-grid", n_grid, "radial nodes");
  steady->add_option("--out", out_dir, "output directory");

  // critical-mass
  auto* cm = app.add_subcommand("critical-mass", "critical mass table at the 4/3 index");
  std::vector<double> ktilde;
  cm->add_option("--ktilde", ktilde, "list of K_tilde values")->required();

  // evolve
  auto* evolve = app.add_subcommand("evolve", "run the Lagrangian evolver");
  std::string config_path;
  std::string evolve_out = "out";
  evolve->add_option("--config", config_path, "key=value config file")->required();
  evolve->add_option("--out", evolve_out, "output directory");

  // verify
  auto* verify = app.add_subcommand("verify", "run the built-in verification suite");
  bool quick = false;
  std::string workdir;
  verify->add_flag("--quick", quick, "sub-minute subset only");
  verify->add_option("--workdir", workdir, "scratch directory for file checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (steady->parsed())
      return cmd_steady(K, epsilon, mass, central_density, entropy, u0, n_grid, out_dir);
    if (cm->parsed()) return cmd_critical_mass(ktilde);
    if (evolve->parsed()) return cmd_evolve(config_path, evolve_out);
    if (verify->parsed()) return cmd_verify(quick, workdir);
  } catch (const RegimeError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitRegime;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitUsage;
  } catch (const SolverError& e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return kExitSolver;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
