// Command-line front end: dispatches subcommands and writes the CSV/JSON
// artifacts behind every figure's data. All floating-point text uses
// 17-significant-digit decimals; reruns with identical flags and seed
// produce byte-identical files regardless of TWIN_ISLE_THREADS.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "twinisle/basins.hpp"
#include "twinisle/equilibria.hpp"
#include "twinisle/integrator.hpp"
#include "twinisle/linear_approx.hpp"
#include "twinisle/model.hpp"
#include "twinisle/separatrix.hpp"
#include "twinisle/shocks.hpp"
#include "twinisle/types.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace twinisle;

namespace {

std::string fmt17(double v) {
  if (v == 0.0) v = 0.0; // drop the sign of negative zero
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

PhasePoint parse_pair(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos)
    throw CLI::ValidationError("expected XA,XB, got '" + s + "'");
  return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
}

std::vector<double> parse_range(const std::string& s) {
  const auto c1 = s.find(':');
  const auto c2 = s.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw CLI::ValidationError("expected A:B:STEP, got '" + s + "'");
  const double a = std::stod(s.substr(0, c1));
  const double b = std::stod(s.substr(c1 + 1, c2 - c1 - 1));
  const double step = std::stod(s.substr(c2 + 1));
  if (step <= 0.0) throw CLI::ValidationError("range step must be positive");
  std::vector<double> out;
  for (double v = a; v <= b + 1e-9; v += step) out.push_back(v);
  return out;
}

Regime parse_regime(const std::string& name) {
  if (name == "globalized") return LinearGlobalized{};
  if (name == "autarky") return Autarky{};
  if (name == "diagonal") return PieceDiagonal{};
  if (name == "sub") return PieceSub{};
  if (name == "super") return PieceSuper{};
  if (name == "single") return SingleLocation{};
  if (name == "general")
    return GeneralTwoLocation{PriceCostSpec::linear_uniform()};
  throw CLI::ValidationError("unknown regime '" + name + "'");
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream os(dir / name, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output file " + name);
  return os;
}

json equilibria_json(const EquilibriaResult& result) {
  json arr = json::array();
  for (const auto& e : result.equilibria) {
    arr.push_back({{"location", {e.location.x_a, e.location.x_b}},
                   {"eigenvalues", {e.eigen[0].value, e.eigen[1].value}},
                   {"eigenvectors",
                    {{e.eigen[0].vector.x_a, e.eigen[0].vector.x_b},
                     {e.eigen[1].vector.x_a, e.eigen[1].vector.x_b}}},
                   {"class", to_string(e.cls)}});
  }
  return {{"equilibria", arr},
          {"unconverged_seed_count", result.unconverged_seeds.size()}};
}

json area_report_json(const AreaReport& r) {
  return {{"area_to_origin", r.area_to_origin},
          {"area_to_one", r.area_to_one},
          {"dark_ratio", r.dark_ratio},
          {"unresolved_fraction", r.unresolved_fraction}};
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"twinisle: two-location epidemic dynamics toolkit"};
  app.require_subcommand(1);

  std::string output_dir = ".";
  unsigned long long seed = 42;
  app.add_option("--output-dir", output_dir, "directory for output files");
  app.add_option("--seed", seed, "seed for sampled estimators");

  double nu = 0.0, q = 0.0;
  auto add_params = [&](CLI::App* sub) {
    sub->add_option("--nu", nu, "contagiousness in (0,1)")->required();
    sub->add_option("--q", q, "quarantine in (0,1)")->required();
  };

  // field
  auto* cmd_field = app.add_subcommand("field", "evaluate the vector field");
  std::string regime_name = "globalized", at_str;
  add_params(cmd_field);
  cmd_field->add_option("--regime", regime_name, "regime name");
  cmd_field->add_option("--at", at_str, "point XA,XB")->required();

  // integrate
  auto* cmd_int = app.add_subcommand("integrate", "integrate a trajectory");
  std::string x0_str;
  double t_max = 5000.0;
  bool backward = false;
  add_params(cmd_int);
  cmd_int->add_option("--regime", regime_name, "regime name");
  cmd_int->add_option("--x0", x0_str, "initial point XA,XB")->required();
  cmd_int->add_option("--t-max", t_max, "time budget");
  cmd_int->add_flag("--backward", backward, "integrate backward in time");

  // equilibria
  auto* cmd_eq = app.add_subcommand("equilibria", "locate fixed points");
  add_params(cmd_eq);
  cmd_eq->add_option("--regime", regime_name, "regime name");

  // separatrix
  auto* cmd_sep = app.add_subcommand("separatrix", "trace the separatrix");
  double offset = 1e-6;
  bool linear = false;
  add_params(cmd_sep);
  cmd_sep->add_option("--offset", offset, "eigenvector offset");
  cmd_sep->add_flag("--linear", linear, "emit the linearized separatrix");

  // basins
  auto* cmd_bas = app.add_subcommand("basins", "classify attraction basins");
  int resolution = 201;
  add_params(cmd_bas);
  cmd_bas->add_option("--regime", regime_name, "regime name");
  cmd_bas->add_option("--resolution", resolution, "grid cells per side")
      ->required();

  // shocks
  auto* cmd_shk = app.add_subcommand("shocks", "shock taxonomy measures");
  std::optional<int> shock_grid;
  std::optional<int> shock_samples;
  add_params(cmd_shk);
  cmd_shk->add_option("--grid", shock_grid, "grid estimator resolution");
  cmd_shk->add_option("--samples", shock_samples, "Monte Carlo sample count");

  // sweep
  auto* cmd_swp = app.add_subcommand("sweep", "parameter sweeps");
  std::string metric, nu_range_str, q_range_str;
  std::optional<double> nu_single;
  int sweep_resolution = 201;
  cmd_swp->add_option("--metric", metric,
                      "eta|zeta|dark-ratio|area|area-tilde|ratio-tilde")
      ->required();
  cmd_swp->add_option("--nu", nu_single, "fixed contagiousness");
  cmd_swp->add_option("--nu-range", nu_range_str, "A:B:STEP");
  cmd_swp->add_option("--q-range", q_range_str, "A:B:STEP")->required();
  cmd_swp->add_option("--resolution", sweep_resolution,
                      "grid resolution for area/dark-ratio metrics");

  // approx-compare
  auto* cmd_cmp = app.add_subcommand(
      "approx-compare", "numeric basin area vs linear approximation");
  std::string cmp_nu_range, cmp_q_range;
  int cmp_resolution = 201;
  cmd_cmp->add_option("--nu-range", cmp_nu_range, "A:B:STEP")->required();
  cmd_cmp->add_option("--q-range", cmp_q_range, "A:B:STEP")->required();
  cmd_cmp->add_option("--resolution", cmp_resolution, "grid cells per side")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const fs::path out_dir = output_dir;

    if (cmd_field->parsed()) {
      const auto params = EpidemicParams::symmetric_params(nu, q);
      const PhasePoint v =
          field(parse_pair(at_str), params, parse_regime(regime_name));
      std::cout << fmt17(v.x_a) << ',' << fmt17(v.x_b) << '\n';
    } else if (cmd_int->parsed()) {
      const auto params = EpidemicParams::symmetric_params(nu, q);
      IntegratorConfig cfg;
      cfg.t_max = t_max;
      StopCondition stop;
      const Trajectory traj = integrate(
          parse_pair(x0_str), params, parse_regime(regime_name), cfg,
          backward ? Direction::Backward : Direction::Forward, stop);
      auto os = open_out(out_dir, "trajectory.csv");
      write_trajectory_csv(os, traj);
    } else if (cmd_eq->parsed()) {
      const auto params = EpidemicParams::symmetric_params(nu, q);
      const json j =
          equilibria_json(find_equilibria(params, parse_regime(regime_name)));
      std::cout << j.dump(2) << '\n';
      open_out(out_dir, "equilibria.json") << j.dump(2) << '\n';
    } else if (cmd_sep->parsed()) {
      const auto params = EpidemicParams::symmetric_params(nu, q);
      if (linear) {
        const LinearSeparatrix line(params);
        const RegionGeometry geom = region_geometry(params);
        std::vector<PhasePoint> pts;
        const int samples = 201;
        for (int i = 0; i <= samples; ++i) {
          const double x = double(i) / samples;
          const double y = line.at(x);
          if (y >= 0.0 && y <= 1.0) pts.push_back({x, y});
        }
        auto os = open_out(out_dir, "linear_separatrix.csv");
        write_polyline_csv(os, pts);
        std::cout << to_string(geom.region_case) << ','
                  << fmt17(geom.p_minus.x_a) << ',' << fmt17(geom.p_minus.x_b)
                  << '\n';
      } else {
        const auto trace = trace_separatrix(params, SaddleSide::Sub, offset);
        auto os = open_out(out_dir, "separatrix.csv");
        write_polyline_csv(os, trace.polyline);
        std::cout << to_string(trace.exit.type) << ','
                  << fmt17(trace.exit.value) << '\n';
      }
    } else if (cmd_bas->parsed()) {
      const auto params = EpidemicParams::symmetric_params(nu, q);
      const BasinGrid grid =
          classify_grid(params, parse_regime(regime_name), resolution);
      auto os = open_out(out_dir, "basins.csv");
      write_grid_csv(os, grid);
      open_out(out_dir, "area_report.json")
          << area_report_json(area_report(grid, params)).dump(2) << '\n';
    } else if (cmd_shk->parsed()) {
      const auto params = EpidemicParams::symmetric_params(nu, q);
      if (shock_grid.has_value() == shock_samples.has_value())
        throw CLI::ValidationError(
            "shocks: give exactly one of --grid or --samples");
      const ShockEstimator est =
          shock_grid ? ShockEstimator::grid(*shock_grid)
                     : ShockEstimator::monte_carlo(*shock_samples, seed);
      const ShockMeasures measures = category_measures(params, est);
      auto os = open_out(out_dir, "shocks.csv");
      write_shocks_csv(os, measures.outcomes);
      json summary;
      for (const auto& [cat, m] : measures.measure)
        summary[to_string(cat)] = m;
      open_out(out_dir, "shock_summary.json") << summary.dump(2) << '\n';
    } else if (cmd_swp->parsed()) {
      std::vector<double> nus;
      if (nu_single) nus.push_back(*nu_single);
      else if (!nu_range_str.empty()) nus = parse_range(nu_range_str);
      else throw CLI::ValidationError("sweep: give --nu or --nu-range");
      const std::vector<double> qs = parse_range(q_range_str);

      auto os = open_out(out_dir, "sweep.csv");
      os << "q,nu,value\n";
      for (double nv : nus) {
        for (double qv : qs) {
          const auto params = EpidemicParams::symmetric_params(nv, qv);
          double value = std::numeric_limits<double>::quiet_NaN();
          if (metric == "eta" || metric == "zeta") {
            const auto trace = trace_separatrix(params, SaddleSide::Sub);
            const bool want_eta = metric == "eta";
            if ((trace.exit.type == SeparatrixExit::Type::Eta) == want_eta)
              value = trace.exit.value;
          } else if (metric == "dark-ratio") {
            value = gray_area_ratio(params, sweep_resolution).dark_ratio;
          } else if (metric == "area") {
            value = gray_area_ratio(params, sweep_resolution).area_to_origin;
          } else if (metric == "area-tilde") {
            value = area_report_tilde(params);
          } else if (metric == "ratio-tilde") {
            value = ratio_tilde(params);
          } else {
            throw CLI::ValidationError("unknown metric '" + metric + "'");
          }
          os << fmt17(qv) << ',' << fmt17(nv) << ',' << fmt17(value) << '\n';
        }
      }
    } else if (cmd_cmp->parsed()) {
      const std::vector<double> nus = parse_range(cmp_nu_range);
      const std::vector<double> qs = parse_range(cmp_q_range);
      auto os = open_out(out_dir, "approx_compare.csv");
      os << "q,nu,area_numeric,area_tilde,abs_diff\n";
      for (double nv : nus) {
        for (double qv : qs) {
          const auto params = EpidemicParams::symmetric_params(nv, qv);
          const double numeric =
              gray_area_ratio(params, cmp_resolution).area_to_origin;
          const double tilde = area_report_tilde(params);
          os << fmt17(qv) << ',' << fmt17(nv) << ',' << fmt17(numeric) << ','
             << fmt17(tilde) << ',' << fmt17(std::abs(numeric - tilde))
             << '\n';
        }
      }
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
