// Acceptance suite: exercises the end-to-end claims of the toolkit, one
// pass/fail line per criterion. All tolerances are pinned here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <twinisle/basins.hpp>
#include <twinisle/equilibria.hpp>
#include <twinisle/integrator.hpp>
#include <twinisle/linear_approx.hpp>
#include <twinisle/model.hpp>
#include <twinisle/separatrix.hpp>
#include <twinisle/shocks.hpp>
#include <twinisle/types.hpp>

namespace fs = std::filesystem;
using namespace twinisle;

namespace {

int failures = 0;

class Timer {
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();

public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }
};

void report(int idx, const std::string& name, bool ok, double secs,
            const std::string& detail = "") {
  std::printf("%s criterion %2d: %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", idx,
              name.c_str(), secs, detail.empty() ? "" : " -- ",
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

// Integrator settings for the large basin grids: same tolerances as the
// defaults, only the step-size cap is relaxed (the error control still
// governs accuracy; the cap only costs time on slow stretches).
IntegratorConfig grid_cfg() {
  IntegratorConfig cfg;
  cfg.max_step = 1.0;
  return cfg;
}

const EquilibriumInfo* find_at(const EquilibriaResult& r, PhasePoint p,
                               double tol = 1e-6) {
  for (const auto& e : r.equilibria)
    if (distance(e.location, p) <= tol) return &e;
  return nullptr;
}

// 1: equilibrium census over the 9x9 parameter grid. Runtime < 10 s.
void criterion1() {
  Timer timer;
  bool ok = true;
  std::string detail;
  for (int i = 1; i <= 9 && ok; ++i) {
    for (int j = 1; j <= 9 && ok; ++j) {
      const auto p = symmetric_params(i / 10.0, j / 10.0);
      const auto glob = find_equilibria(p, LinearGlobalized{});
      const auto* origin = find_at(glob, {0, 0});
      const auto* saddle = find_at(glob, {p.q(), p.q()});
      const auto* one = find_at(glob, {1, 1});
      if (glob.equilibria.size() != 3 || !origin || !saddle || !one ||
          origin->cls != StabilityClass::StableNode ||
          saddle->cls != StabilityClass::Saddle ||
          one->cls != StabilityClass::StableNode) {
        ok = false;
        detail = "globalized census wrong at nu=" + std::to_string(p.nu()) +
                 " q=" + std::to_string(p.q());
        break;
      }
      const auto aut = find_equilibria(p, Autarky{});
      int nodes = 0, saddles = 0, sources = 0;
      for (const auto& e : aut.equilibria) {
        if (e.cls == StabilityClass::StableNode) ++nodes;
        else if (e.cls == StabilityClass::Saddle) ++saddles;
        else ++sources;
      }
      if (aut.equilibria.size() != 9 || nodes != 4 || saddles != 4 ||
          sources != 1) {
        ok = false;
        detail = "autarky census wrong at nu=" + std::to_string(p.nu()) +
                 " q=" + std::to_string(p.q());
      }
    }
  }
  const double secs = timer.seconds();
  if (secs >= 10.0) {
    ok = false;
    detail = "runtime budget (10 s) exceeded";
  }
  report(1, "equilibrium census, 9x9 parameter grid", ok, secs, detail);
}

// 2: numerical eigenvalues at the three globalized equilibria match the
// closed forms to 1e-8.
void criterion2() {
  Timer timer;
  bool ok = true;
  double worst = 0.0;
  for (int i = 1; i <= 9; ++i) {
    for (int j = 1; j <= 9; ++j) {
      const auto p = symmetric_params(i / 10.0, j / 10.0);
      const double nu = p.nu(), q = p.q();
      const struct {
        PhasePoint at;
        double l1, l2; // descending
      } anchors[] = {
          {{0, 0}, -q * nu, -q * nu},
          {{q, q}, q * nu * (1 - q), -q * (1 + nu * (1 - q))},
          {{1, 1}, -(1 - q) * nu, -1 - (1 - q) * nu},
      };
      for (const auto& a : anchors) {
        const auto e = eigen2x2(
            twinisle::detail::numeric_jacobian(p, PieceSub{}, a.at));
        worst = std::max(worst, std::abs(e[0].value - a.l1));
        worst = std::max(worst, std::abs(e[1].value - a.l2));
      }
    }
  }
  ok = worst <= 1e-8;
  report(2, "eigenvalue anchors to 1e-8", ok, timer.seconds(),
         "max deviation " + std::to_string(worst));
}

// 3: eta/zeta switch at nu=0.7 lies in [0.37, 0.41]. Runtime < 30 s.
void criterion3() {
  Timer timer;
  std::vector<double> qs;
  for (double q = 0.05; q <= 0.951; q += 0.05) qs.push_back(q);
  const auto sweep = eta_zeta_sweep(0.7, qs);
  const double secs = timer.seconds();
  bool ok = sweep.threshold.has_value() && *sweep.threshold >= 0.37 &&
            *sweep.threshold <= 0.41 && secs < 30.0;
  report(3, "exit-type threshold at nu=0.7 in [0.37,0.41]", ok, secs,
         sweep.threshold ? "q* = " + std::to_string(*sweep.threshold)
                         : "no threshold found");
}

// 4: monotone trends: eta increasing with eta > q, zeta increasing with
// zeta < q, dark ratio strictly decreasing in q. Runtime < 5 min.
void criterion4() {
  Timer timer;
  bool ok = true;
  std::string detail;

  double prev = -1.0;
  for (double q = 0.05; q <= 0.351; q += 0.05) {
    const auto t =
        trace_separatrix(symmetric_params(0.7, q), SaddleSide::Sub);
    if (t.exit.type != SeparatrixExit::Type::Eta || t.exit.value <= q ||
        t.exit.value <= prev) {
      ok = false;
      detail = "eta trend broken at q=" + std::to_string(q);
    }
    prev = t.exit.value;
  }

  prev = -1.0;
  for (double q = 0.45; q <= 0.901; q += 0.05) {
    const auto t =
        trace_separatrix(symmetric_params(0.7, q), SaddleSide::Sub);
    if (t.exit.type != SeparatrixExit::Type::Zeta || t.exit.value >= q ||
        t.exit.value <= prev) {
      ok = false;
      detail = "zeta trend broken at q=" + std::to_string(q);
    }
    prev = t.exit.value;
  }

  prev = 2.0;
  for (double q = 0.1; q <= 0.601; q += 0.1) {
    const double ratio =
        gray_area_ratio(symmetric_params(0.7, q), 201, grid_cfg()).dark_ratio;
    if (ratio >= prev) {
      ok = false;
      detail = "dark ratio not decreasing at q=" + std::to_string(q);
    }
    prev = ratio;
  }

  const double secs = timer.seconds();
  if (secs >= 300.0) {
    ok = false;
    detail = "runtime budget (300 s) exceeded";
  }
  report(4, "monotone eta/zeta/dark-ratio trends", ok, secs, detail);
}

// 5: autarky basin grid (n=101) equals the rectangle oracle on every cell
// whose center is at least 1e-3 away from the q-lines.
void criterion5() {
  Timer timer;
  const auto p = symmetric_params(0.7, 0.4);
  const int n = 101;
  const auto grid = classify_grid(p, Autarky{}, n, grid_cfg());
  int mismatches = 0, compared = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const PhasePoint c{(i + 0.5) / n, (j + 0.5) / n};
      if (std::abs(c.x_a - p.q()) < 1e-3 || std::abs(c.x_b - p.q()) < 1e-3)
        continue;
      ++compared;
      if (grid.at(i, j) != autarky_oracle(c, p.q())) ++mismatches;
    }
  }
  report(5, "autarky grid matches the rectangle oracle", mismatches == 0,
         timer.seconds(),
         std::to_string(mismatches) + " mismatches of " +
             std::to_string(compared));
}

// 6: invariance suite: 1000 random forward trajectories stay inside the
// unit square to 1e-6; the globalized basin grid is transpose symmetric;
// diagonal starts stay on the diagonal to 1e-9.
void criterion6() {
  Timer timer;
  bool ok = true;
  std::string detail;

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  IntegratorConfig cfg;
  cfg.t_max = 100.0;
  for (int k = 0; k < 1000 && ok; ++k) {
    const double nu = 0.05 + 0.9 * u(rng);
    const double q = 0.05 + 0.9 * u(rng);
    const auto traj = integrate({u(rng), u(rng)}, symmetric_params(nu, q),
                                LinearGlobalized{}, cfg, Direction::Forward,
                                {});
    for (const auto& s : traj.samples) {
      if (s.p.x_a < -1e-6 || s.p.x_a > 1 + 1e-6 || s.p.x_b < -1e-6 ||
          s.p.x_b > 1 + 1e-6) {
        ok = false;
        detail = "containment violated";
        break;
      }
    }
  }

  const auto p = symmetric_params(0.7, 0.4);
  const int n = 101;
  const auto grid = classify_grid(p, LinearGlobalized{}, n, grid_cfg());
  for (int j = 0; j < n && ok; ++j)
    for (int i = 0; i < n && ok; ++i)
      if (grid.at(i, j) != grid.at(j, i)) {
        ok = false;
        detail = "transpose symmetry violated";
      }

  for (double x0 : {0.05, 0.3, 0.41, 0.7, 0.95}) {
    const auto traj = integrate({x0, x0}, p, LinearGlobalized{}, cfg,
                                Direction::Forward, {});
    for (const auto& s : traj.samples)
      if (std::abs(s.p.x_a - s.p.x_b) > 1e-9) {
        ok = false;
        detail = "diagonal invariance violated";
      }
  }

  report(6, "invariance suite (containment, symmetry, diagonal)", ok,
         timer.seconds(), detail);
}

// 7: the closed-form basin area approximates the numerical area within
// 0.05 across the parameter grid; near the saddle the separatrix deviates
// from its tangent line quadratically (stable K in d <= K r^2).
void criterion7() {
  Timer timer;
  bool ok = true;
  std::string detail;
  double worst = 0.0;
  for (double nu : {0.2, 0.4, 0.6, 0.8}) {
    for (double q = 0.1; q <= 0.601; q += 0.1) {
      const auto p = symmetric_params(nu, q);
      const double numeric =
          gray_area_ratio(p, 201, grid_cfg()).area_to_origin;
      const double tilde = area_report_tilde(p);
      worst = std::max(worst, std::abs(numeric - tilde));
    }
  }
  if (worst > 0.05) {
    ok = false;
    detail = "area gap " + std::to_string(worst);
  }

  // tangency: pick the trace point at radius ~r from the saddle and fit
  // K = d/r^2 against the linearized branch; K must be stable within x2
  const auto p = symmetric_params(0.7, 0.3);
  const auto trace = trace_separatrix(p, SaddleSide::Sub);
  const LinearSeparatrix line(p);
  const PhasePoint saddle{p.q(), p.q()};
  std::vector<double> ks;
  for (double r : {0.02, 0.04, 0.08}) {
    for (const auto& pt : trace.polyline) {
      if (distance(pt, saddle) >= r) {
        ks.push_back(line.distance_sub(pt) / (r * r));
        break;
      }
    }
  }
  if (ks.size() != 3) {
    ok = false;
    detail = "trace too short for the tangency check";
  } else {
    const double kmin = std::min({ks[0], ks[1], ks[2]});
    const double kmax = std::max({ks[0], ks[1], ks[2]});
    if (!(kmax <= 2.0 * kmin)) {
      ok = false;
      detail = "tangency constant unstable: " + std::to_string(kmin) + ".." +
               std::to_string(kmax);
    }
  }
  if (ok)
    detail = "max area gap " + std::to_string(worst);
  report(7, "linear approximation fidelity and tangency", ok, timer.seconds(),
         detail);
}

// 8: closed-form self-consistency: p_minus lies on the line (1e-14), the
// area ratio is 1/2 on the case boundary (1e-12), the ratio derivatives
// match finite differences (1e-5).
void criterion8() {
  Timer timer;
  bool ok = true;
  std::string detail;
  for (int i = 1; i <= 9 && ok; ++i) {
    for (int j = 1; j <= 9 && ok; ++j) {
      const auto p = symmetric_params(i / 10.0, j / 10.0);
      const LinearSeparatrix line(p);
      const auto pm = p_minus(p);
      if (std::abs(line.at(pm.x_a) - pm.x_b) > 1e-14) {
        ok = false;
        detail = "p_minus off the line";
      }
    }
  }
  for (double q : {0.2, 0.3, 0.4}) {
    const auto p = symmetric_params(q / (2 * (1 - q) * (1 - q)), q);
    if (std::abs(ratio_tilde(p) - 0.5) > 1e-12) {
      ok = false;
      detail = "boundary ratio not 1/2 at q=" + std::to_string(q);
    }
  }
  const double h = 1e-6;
  for (const auto& [nu, q] :
       {std::pair{0.7, 0.2}, {0.7, 0.5}, {0.25, 0.15}, {0.15, 0.6}}) {
    const auto d = ratio_tilde_derivatives(symmetric_params(nu, q));
    const double fq = (ratio_tilde(symmetric_params(nu, q + h)) -
                       ratio_tilde(symmetric_params(nu, q - h))) /
                      (2 * h);
    const double fn = (ratio_tilde(symmetric_params(nu + h, q)) -
                       ratio_tilde(symmetric_params(nu - h, q))) /
                      (2 * h);
    if (std::abs(d.d_dq - fq) > 1e-5 || std::abs(d.d_dnu - fn) > 1e-5) {
      ok = false;
      detail = "derivative mismatch at nu=" + std::to_string(nu) +
               " q=" + std::to_string(q);
    }
  }
  report(8, "closed-form self-consistency", ok, timer.seconds(), detail);
}

// 9: shock taxonomy measures at nu=0.7, q=0.4: the trivial categories hit
// their exact areas within grid resolution, and the seeded Monte Carlo
// estimate agrees with the grid within 0.01 per category.
void criterion9() {
  Timer timer;
  bool ok = true;
  std::string detail;
  const auto p = symmetric_params(0.7, 0.4);
  const int n = 201;
  const auto grid = category_measures(p, ShockEstimator::grid(n), grid_cfg());
  const double q = p.q();
  const double recover = grid.measure.at(ShockCategory::BothRecover);
  const double infected = grid.measure.at(ShockCategory::BothInfected);
  // [0,q)^2 recovers under both regimes and (q,1]^2 stays infected under
  // both, so those categories equal the quadrant areas up to the O(1/n)
  // perimeter cells
  if (std::abs(recover - q * q) > 2.0 / n ||
      std::abs(infected - (1 - q) * (1 - q)) > 2.0 / n) {
    ok = false;
    detail = "quadrant measures off: " + std::to_string(recover) + ", " +
             std::to_string(infected);
  }
  if (grid.measure.at(ShockCategory::Indeterminate) != 0.0) {
    ok = false;
    detail = "indeterminate shocks on the grid";
  }
  const auto mc = category_measures(
      p, ShockEstimator::monte_carlo(100000, 42), grid_cfg());
  for (ShockCategory c :
       {ShockCategory::BothRecover, ShockCategory::BothInfected,
        ShockCategory::GlobAdvantage, ShockCategory::GlobDisadvantage}) {
    const double gap = std::abs(grid.measure.at(c) - mc.measure.at(c));
    if (gap > 0.01) {
      ok = false;
      detail = std::string("grid/MC gap ") + std::to_string(gap) + " for " +
               to_string(c);
    }
  }
  report(9, "shock taxonomy measures (grid vs Monte Carlo)", ok,
         timer.seconds(), detail);
}

// 10: CLI outputs are byte-identical across reruns and thread counts.
void criterion10() {
  Timer timer;
  bool ok = true;
  std::string detail;
  const fs::path base = fs::temp_directory_path() / "twinisle_acceptance";
  fs::remove_all(base);

  auto run = [&](const std::string& threads, const fs::path& dir,
                 const std::string& args) {
    const std::string cmd = "TWIN_ISLE_THREADS=" + threads + " " +
                            TWINISLE_CLI_PATH + " --output-dir " +
                            dir.string() + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) && WEXITSTATUS(status) == 0;
  };
  auto slurp = [](const fs::path& f) {
    std::ifstream is(f, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
  };

  if (!run("1", base / "a", "basins --nu 0.7 --q 0.4 --resolution 41") ||
      !run("2", base / "b", "basins --nu 0.7 --q 0.4 --resolution 41") ||
      !run("1", base / "a", "--seed 42 shocks --nu 0.7 --q 0.4 --samples 2000") ||
      !run("3", base / "b", "--seed 42 shocks --nu 0.7 --q 0.4 --samples 2000")) {
    ok = false;
    detail = "CLI run failed";
  } else {
    for (const char* f : {"basins.csv", "area_report.json", "shocks.csv",
                          "shock_summary.json"}) {
      const std::string a = slurp(base / "a" / f);
      if (a.empty() || a != slurp(base / "b" / f)) {
        ok = false;
        detail = std::string("files differ: ") + f;
      }
    }
  }
  report(10, "byte-identical CLI reruns across thread counts", ok,
         timer.seconds(), detail);
}

} // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  if (failures) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
