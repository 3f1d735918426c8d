#ifndef TWINISLE_BASINS_HPP
#define TWINISLE_BASINS_HPP

/*
  Basin-of-attraction classification on the unit square.

  Cell centers (i+0.5)/n are integrated forward until they come within
  delta = 1e-4 of an attractor of the regime (attractors are computed from
  the equilibrium finder, not hard-coded, so the same path serves the
  globalized and autarky regimes). Cells whose runs hit the time budget
  are labeled Unresolved, never silently classified.
*/

#include <cstdio>
#include <ostream>
#include <random>
#include <vector>

#include "equilibria.hpp"
#include "integrator.hpp"
#include "model.hpp"
#include "parallel.hpp"
#include "types.hpp"

namespace twinisle {

enum class BasinLabel : int {
  ToOrigin = 0,
  ToOne = 1,
  ToZeroOne = 2, // partial endemic (0,1); autarky only
  ToOneZero = 3, // partial endemic (1,0); autarky only
  Unresolved = 9
};

inline const char* to_string(BasinLabel l) {
  switch (l) {
    case BasinLabel::ToOrigin: return "origin";
    case BasinLabel::ToOne: return "one";
    case BasinLabel::ToZeroOne: return "zero_one";
    case BasinLabel::ToOneZero: return "one_zero";
    default: return "unresolved";
  }
}

class OnBoundary : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Stable attractors of a regime, as labeled stop targets.
struct AttractorSet {
  std::vector<PhasePoint> locations;
  std::vector<BasinLabel> labels;

  static AttractorSet compute(const EpidemicParams& params,
                              const Regime& regime) {
    AttractorSet set;
    for (const auto& e : find_equilibria(params, regime).equilibria) {
      if (e.cls != StabilityClass::StableNode) continue;
      set.locations.push_back(e.location);
      const bool a_high = e.location.x_a > 0.5;
      const bool b_high = e.location.x_b > 0.5;
      set.labels.push_back(a_high ? (b_high ? BasinLabel::ToOne
                                            : BasinLabel::ToOneZero)
                                  : (b_high ? BasinLabel::ToZeroOne
                                            : BasinLabel::ToOrigin));
    }
    return set;
  }
};

/// Forward-integration label of a single initial condition.
inline BasinLabel classify_point(PhasePoint x0, const EpidemicParams& params,
                                 const Regime& regime,
                                 const IntegratorConfig& cfg,
                                 const AttractorSet& attractors) {
  StopCondition stop;
  stop.attractors = attractors.locations;
  stop.delta = 1e-4;
  try {
    const TerminalReason r =
        integrate_terminal(x0, params, regime, cfg, Direction::Forward, stop);
    if (r.kind == TerminalReason::Kind::ConvergedToAttractor)
      return attractors.labels[static_cast<std::size_t>(r.attractor)];
  } catch (const IntegrationError&) {
    // fall through: report honestly as unresolved
  }
  return BasinLabel::Unresolved;
}

inline BasinLabel classify_point(PhasePoint x0, const EpidemicParams& params,
                                 const Regime& regime,
                                 const IntegratorConfig& cfg = {}) {
  return classify_point(x0, params, regime, cfg,
                        AttractorSet::compute(params, regime));
}

/// Per-cell attractor labels over [0,1]^2, row-major with row 0 at the
/// smallest x_b; cell (i,j) has center ((i+0.5)/n, (j+0.5)/n).
struct BasinGrid {
  int resolution = 0;
  std::vector<BasinLabel> labels; // labels[j*n + i]

  BasinLabel at(int i, int j) const {
    return labels[static_cast<std::size_t>(j) * resolution + i];
  }
};

inline BasinGrid classify_grid(const EpidemicParams& params,
                               const Regime& regime, int n,
                               const IntegratorConfig& cfg = {}) {
  if (n < 2) throw std::invalid_argument("classify_grid: n must be >= 2");
  const AttractorSet attractors = AttractorSet::compute(params, regime);
  BasinGrid grid;
  grid.resolution = n;
  grid.labels.assign(static_cast<std::size_t>(n) * n, BasinLabel::Unresolved);
  parallel_for(grid.labels.size(), [&](std::size_t k) {
    const int i = static_cast<int>(k) % n;
    const int j = static_cast<int>(k) / n;
    const PhasePoint center{(i + 0.5) / n, (j + 0.5) / n};
    grid.labels[k] = classify_point(center, params, regime, cfg, attractors);
  });
  return grid;
}

/// Closed-form autarky label: pure comparison against the q-lines.
/// Components within `margin` of q are refused (OnBoundary).
inline BasinLabel autarky_oracle(PhasePoint x0, double q,
                                 double margin = 1e-9) {
  if (std::abs(x0.x_a - q) < margin || std::abs(x0.x_b - q) < margin)
    throw OnBoundary("autarky_oracle: component within margin of q");
  const bool a_high = x0.x_a > q;
  const bool b_high = x0.x_b > q;
  return a_high ? (b_high ? BasinLabel::ToOne : BasinLabel::ToOneZero)
                : (b_high ? BasinLabel::ToZeroOne : BasinLabel::ToOrigin);
}

struct AreaReport {
  double area_to_origin = 0.0;
  double area_to_one = 0.0;
  double dark_ratio = 0.0; // ToOne fraction of the off-diagonal rectangles
  double unresolved_fraction = 0.0;
};

/// Areas and the dark-gray ratio of a globalized grid. The rectangles of
/// interest are [q,1]x[0,q] and its mirror; cells there labeled ToOne are
/// the shocks where globalization loses to autarky.
inline AreaReport area_report(const BasinGrid& grid,
                              const EpidemicParams& params) {
  const int n = grid.resolution;
  const double q = params.q_a();
  std::size_t origin = 0, one = 0, unresolved = 0;
  std::size_t rect_cells = 0, rect_one = 0;
  for (int j = 0; j < n; ++j) {
    const double y = (j + 0.5) / n;
    for (int i = 0; i < n; ++i) {
      const double x = (i + 0.5) / n;
      const BasinLabel l = grid.at(i, j);
      if (l == BasinLabel::ToOrigin) ++origin;
      else if (l == BasinLabel::ToOne) ++one;
      else if (l == BasinLabel::Unresolved) ++unresolved;
      const bool in_rect = (x >= q && y <= q) || (x <= q && y >= q);
      if (in_rect) {
        ++rect_cells;
        if (l == BasinLabel::ToOne) ++rect_one;
      }
    }
  }
  const double total = static_cast<double>(n) * n;
  AreaReport report;
  report.area_to_origin = origin / total;
  report.area_to_one = one / total;
  report.unresolved_fraction = unresolved / total;
  report.dark_ratio =
      rect_cells == 0 ? 0.0 : static_cast<double>(rect_one) / rect_cells;
  return report;
}

inline AreaReport gray_area_ratio(const EpidemicParams& params, int n,
                                  const IntegratorConfig& cfg = {}) {
  params.require_symmetric("gray_area_ratio");
  return area_report(classify_grid(params, LinearGlobalized{}, n, cfg),
                     params);
}

/// Seeded Monte Carlo cross-check of the grid areas: uniform shocks on
/// [0,1]^2, sample sequence independent of the worker count.
inline AreaReport monte_carlo_area(const EpidemicParams& params,
                                   const Regime& regime, int samples,
                                   unsigned long long seed = 42,
                                   const IntegratorConfig& cfg = {}) {
  if (samples < 1)
    throw std::invalid_argument("monte_carlo_area: samples must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<PhasePoint> points(static_cast<std::size_t>(samples));
  for (auto& p : points) {
    p.x_a = u(rng);
    p.x_b = u(rng);
  }
  const AttractorSet attractors = AttractorSet::compute(params, regime);
  std::vector<BasinLabel> labels(points.size());
  parallel_for(points.size(), [&](std::size_t k) {
    labels[k] = classify_point(points[k], params, regime, cfg, attractors);
  });

  const double q = params.q_a();
  std::size_t origin = 0, one = 0, unresolved = 0, rect = 0, rect_one = 0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (labels[k] == BasinLabel::ToOrigin) ++origin;
    else if (labels[k] == BasinLabel::ToOne) ++one;
    else if (labels[k] == BasinLabel::Unresolved) ++unresolved;
    const bool in_rect = (points[k].x_a >= q && points[k].x_b <= q) ||
                         (points[k].x_a <= q && points[k].x_b >= q);
    if (in_rect) {
      ++rect;
      if (labels[k] == BasinLabel::ToOne) ++rect_one;
    }
  }
  AreaReport report;
  report.area_to_origin = origin / double(samples);
  report.area_to_one = one / double(samples);
  report.unresolved_fraction = unresolved / double(samples);
  report.dark_ratio = rect == 0 ? 0.0 : double(rect_one) / rect;
  return report;
}

/// CSV matrix of integer labels, row-major, row 0 = smallest x_b.
inline void write_grid_csv(std::ostream& os, const BasinGrid& grid) {
  const int n = grid.resolution;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (i) os << ',';
      os << static_cast<int>(grid.at(i, j));
    }
    os << '\n';
  }
}

} // namespace twinisle

#endif
