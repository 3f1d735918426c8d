#ifndef TWINISLE_INTEGRATOR_HPP
#define TWINISLE_INTEGRATOR_HPP

/*
  Adaptive trajectory integration for all regimes.

  Embedded Dormand-Prince 5(4) pair with FSAL. For the piecewise
  LinearGlobalized field, each accepted step evaluates a single smooth
  piece, chosen by the side of the diagonal at the step start; steps that
  would land on the other side are split at the crossing by bisection on
  the step length (to 1e-12 in t). The field is continuous and piecewise
  polynomial, so splitting restores the full order of the pair.

  Forward trajectories in the unit-square regimes are clamped back into
  [0,1]^2 when the overshoot does not exceed cfg.clamp_tol. When a run is
  meant to exit the square (backward manifold traces), the exiting step is
  refined so the last two samples bracket the boundary within 1e-10.
*/

#include <cmath>
#include <cstdio>
#include <ostream>
#include <vector>

#include "model.hpp"
#include "types.hpp"

namespace twinisle {

struct IntegratorConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double max_step = 0.1;
  double clamp_tol = 1e-9;
  double t_max = 5000.0;
};

enum class Direction { Forward, Backward };

struct StopCondition {
  std::vector<PhasePoint> attractors; // stop within delta of any of these
  double delta = 1e-4;
  bool stop_on_domain_exit = false; // refine and report unit-square exit
};

struct TerminalReason {
  enum class Kind { ReachedTMax, ConvergedToAttractor, ExitedDomain } kind =
      Kind::ReachedTMax;
  int attractor = -1;        // index into StopCondition::attractors
  PhasePoint boundary_point; // for ExitedDomain
};

struct Trajectory {
  struct Sample {
    double t;
    PhasePoint p;
  };
  std::vector<Sample> samples;
  TerminalReason terminal;
};

class IntegrationError : public std::runtime_error {
public:
  IntegrationError(const std::string& what, double t, PhasePoint last)
      : std::runtime_error(what), t_last(t), last_state(last) {}
  double t_last;
  PhasePoint last_state;
};

class StepSizeUnderflow : public IntegrationError {
public:
  using IntegrationError::IntegrationError;
};

class NonFiniteState : public IntegrationError {
public:
  using IntegrationError::IntegrationError;
};

class NoCrossing : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

// Flattened field evaluator; avoids std::function in the hot loop.
struct FieldOracle {
  enum class Kind { Globalized, Autarky, Diagonal, Sub, Super, General,
                    Single };
  Kind kind;
  const EpidemicParams& params;
  const PriceCostSpec* spec = nullptr;

  static FieldOracle make(const EpidemicParams& params, const Regime& regime) {
    if (std::holds_alternative<LinearGlobalized>(regime)) {
      params.require_symmetric("integrate(LinearGlobalized)");
      return {Kind::Globalized, params, nullptr};
    }
    if (std::holds_alternative<Autarky>(regime))
      return {Kind::Autarky, params, nullptr};
    if (std::holds_alternative<PieceDiagonal>(regime)) {
      params.require_symmetric("integrate(PieceDiagonal)");
      return {Kind::Diagonal, params, nullptr};
    }
    if (std::holds_alternative<PieceSub>(regime)) {
      params.require_symmetric("integrate(PieceSub)");
      return {Kind::Sub, params, nullptr};
    }
    if (std::holds_alternative<PieceSuper>(regime)) {
      params.require_symmetric("integrate(PieceSuper)");
      return {Kind::Super, params, nullptr};
    }
    if (const auto* g = std::get_if<GeneralTwoLocation>(&regime))
      return {Kind::General, params, &g->spec};
    return {Kind::Single, params, nullptr};
  }

  bool piecewise() const { return kind == Kind::Globalized; }

  // side: -1 sub-diagonal piece, +1 super-diagonal, 0 diagonal.
  // Only meaningful for the Globalized kind.
  PhasePoint eval(PhasePoint p, int side) const {
    switch (kind) {
      case Kind::Globalized:
        if (side < 0) return detail::field_sub(p, params.nu(), params.q());
        if (side > 0) return detail::field_super(p, params.nu(), params.q());
        return detail::field_diagonal(p, params.nu(), params.q());
      case Kind::Autarky:
        return field_autarky(p, params);
      case Kind::Diagonal:
        return detail::field_diagonal(p, params.nu(), params.q());
      case Kind::Sub:
        return detail::field_sub(p, params.nu(), params.q());
      case Kind::Super:
        return detail::field_super(p, params.nu(), params.q());
      case Kind::General:
        return field_general(p, params, *spec);
      default:
        return {single_location_rhs(p.x_a, params.nu_a(), params.q_a()), 0.0};
    }
  }
};

struct RkResult {
  PhasePoint y;
  PhasePoint err;
};

// One Dormand-Prince 5(4) step of signed length h on a fixed smooth piece.
// k1 is the (reusable, FSAL) derivative at the start point.
inline RkResult dopri_step(const FieldOracle& f, int side, PhasePoint y0,
                           PhasePoint k1, double h, PhasePoint& k7_out) {
  auto ax = [&](double c1, PhasePoint v1) {
    return PhasePoint{y0.x_a + h * c1 * v1.x_a, y0.x_b + h * c1 * v1.x_b};
  };
  const PhasePoint k2 = f.eval(ax(1.0 / 5, k1), side);
  const PhasePoint k3 = f.eval(
      {y0.x_a + h * (3.0 / 40 * k1.x_a + 9.0 / 40 * k2.x_a),
       y0.x_b + h * (3.0 / 40 * k1.x_b + 9.0 / 40 * k2.x_b)},
      side);
  const PhasePoint k4 = f.eval(
      {y0.x_a + h * (44.0 / 45 * k1.x_a - 56.0 / 15 * k2.x_a +
                     32.0 / 9 * k3.x_a),
       y0.x_b + h * (44.0 / 45 * k1.x_b - 56.0 / 15 * k2.x_b +
                     32.0 / 9 * k3.x_b)},
      side);
  const PhasePoint k5 = f.eval(
      {y0.x_a + h * (19372.0 / 6561 * k1.x_a - 25360.0 / 2187 * k2.x_a +
                     64448.0 / 6561 * k3.x_a - 212.0 / 729 * k4.x_a),
       y0.x_b + h * (19372.0 / 6561 * k1.x_b - 25360.0 / 2187 * k2.x_b +
                     64448.0 / 6561 * k3.x_b - 212.0 / 729 * k4.x_b)},
      side);
  const PhasePoint k6 = f.eval(
      {y0.x_a + h * (9017.0 / 3168 * k1.x_a - 355.0 / 33 * k2.x_a +
                     46732.0 / 5247 * k3.x_a + 49.0 / 176 * k4.x_a -
                     5103.0 / 18656 * k5.x_a),
       y0.x_b + h * (9017.0 / 3168 * k1.x_b - 355.0 / 33 * k2.x_b +
                     46732.0 / 5247 * k3.x_b + 49.0 / 176 * k4.x_b -
                     5103.0 / 18656 * k5.x_b)},
      side);
  const PhasePoint y1{
      y0.x_a + h * (35.0 / 384 * k1.x_a + 500.0 / 1113 * k3.x_a +
                    125.0 / 192 * k4.x_a - 2187.0 / 6784 * k5.x_a +
                    11.0 / 84 * k6.x_a),
      y0.x_b + h * (35.0 / 384 * k1.x_b + 500.0 / 1113 * k3.x_b +
                    125.0 / 192 * k4.x_b - 2187.0 / 6784 * k5.x_b +
                    11.0 / 84 * k6.x_b)};
  const PhasePoint k7 = f.eval(y1, side);
  k7_out = k7;
  const PhasePoint err{
      h * (71.0 / 57600 * k1.x_a - 71.0 / 16695 * k3.x_a +
           71.0 / 1920 * k4.x_a - 17253.0 / 339200 * k5.x_a +
           22.0 / 525 * k6.x_a - 1.0 / 40 * k7.x_a),
      h * (71.0 / 57600 * k1.x_b - 71.0 / 16695 * k3.x_b +
           71.0 / 1920 * k4.x_b - 17253.0 / 339200 * k5.x_b +
           22.0 / 525 * k6.x_b - 1.0 / 40 * k7.x_b)};
  return {y1, err};
}

inline int diagonal_side(PhasePoint p) {
  const double d = p.x_a - p.x_b;
  return d > 0.0 ? -1 : (d < 0.0 ? 1 : 0);
}

inline bool outside_unit_square(PhasePoint p, double tol) {
  return p.x_a < -tol || p.x_a > 1.0 + tol || p.x_b < -tol ||
         p.x_b > 1.0 + tol;
}

// Largest per-coordinate overshoot beyond [0,1]^2.
inline double overshoot(PhasePoint p) {
  double o = 0.0;
  o = std::max(o, -p.x_a);
  o = std::max(o, p.x_a - 1.0);
  o = std::max(o, -p.x_b);
  o = std::max(o, p.x_b - 1.0);
  return o;
}

// Core loop. The observer is called as obs(t, p) for the initial state and
// after every accepted step.
template <class Observer>
TerminalReason integrate_core(PhasePoint x0, const EpidemicParams& params,
                              const Regime& regime,
                              const IntegratorConfig& cfg, Direction dir,
                              const StopCondition& stop, Observer&& obs) {
  const FieldOracle f = FieldOracle::make(params, regime);
  const double sign = dir == Direction::Forward ? 1.0 : -1.0;
  const bool clamp_runs = dir == Direction::Forward && !stop.stop_on_domain_exit;

  double t = 0.0;
  PhasePoint y = x0;
  obs(t, y);

  auto check_attractors = [&](PhasePoint p) -> int {
    for (std::size_t i = 0; i < stop.attractors.size(); ++i)
      if (distance(p, stop.attractors[i]) <= stop.delta)
        return static_cast<int>(i);
    return -1;
  };
  if (int a = check_attractors(y); a >= 0)
    return {TerminalReason::Kind::ConvergedToAttractor, a, {}};

  double h = sign * std::min(cfg.max_step, 1e-2);
  int side = f.piecewise() ? diagonal_side(y) : 0;
  PhasePoint k1 = f.eval(y, side);

  while (std::abs(t) < cfg.t_max) {
    if (std::abs(t) + std::abs(h) > cfg.t_max)
      h = sign * (cfg.t_max - std::abs(t));
    if (std::abs(h) < 1e-14)
      throw StepSizeUnderflow("step size underflow", t, y);

    PhasePoint k7;
    RkResult r = dopri_step(f, side, y, k1, h, k7);
    if (!std::isfinite(r.y.x_a) || !std::isfinite(r.y.x_b))
      throw NonFiniteState("non-finite state", t, y);

    const double sa =
        cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y.x_a), std::abs(r.y.x_a));
    const double sb =
        cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y.x_b), std::abs(r.y.x_b));
    const double ea = r.err.x_a / sa, eb = r.err.x_b / sb;
    const double err = std::sqrt(0.5 * (ea * ea + eb * eb));

    if (err > 1.0) {
      const double fac = std::max(0.2, 0.9 * std::pow(err, -0.2));
      h *= fac;
      continue;
    }

    double h_accept = h;
    PhasePoint y_new = r.y;
    PhasePoint k7_new = k7;
    bool side_flips = false;

    if (f.piecewise() && side != 0) {
      const double d_new = y_new.x_a - y_new.x_b;
      if (std::abs(d_new) <= 1e-13) {
        // at rounding distance from the (invariant, here attracting)
        // diagonal: land on it exactly so the diagonal piece takes over
        const double m = 0.5 * (y_new.x_a + y_new.x_b);
        y_new = {m, m};
        side_flips = true;
      } else if (d_new * side > 0.0) {
        // the step crosses the diagonal: bisect the step length until the
        // endpoint sits on the far side within 1e-12 in t
        double lo = 0.0, hi = h_accept;
        while (std::abs(hi - lo) > 1e-12) {
          const double mid = 0.5 * (lo + hi);
          PhasePoint kt;
          const RkResult rm = dopri_step(f, side, y, k1, mid, kt);
          const double dm = rm.y.x_a - rm.y.x_b;
          if (dm * side > 0.0) {
            hi = mid;
            y_new = rm.y;
            k7_new = kt;
          } else {
            lo = mid;
          }
        }
        h_accept = hi;
        side_flips = true;
      }
    }

    // unit-square bookkeeping
    const double over = overshoot(y_new);
    if (over > 0.0) {
      if (stop.stop_on_domain_exit && over > cfg.clamp_tol) {
        // refine the exit so the bracketing samples are 1e-10 tight
        double lo = 0.0, hi = h_accept;
        PhasePoint inside = y, out_pt = y_new;
        while (overshoot(out_pt) - 0.0 > 1e-10 && std::abs(hi - lo) > 1e-14) {
          const double mid = 0.5 * (lo + hi);
          PhasePoint kt;
          const RkResult rm = dopri_step(f, side, y, k1, mid, kt);
          if (overshoot(rm.y) > 0.0) {
            hi = mid;
            out_pt = rm.y;
          } else {
            lo = mid;
            inside = rm.y;
          }
        }
        if (std::abs(lo) > 0.0) obs(t + lo, inside);
        obs(t + hi, out_pt);
        PhasePoint b = out_pt;
        b.x_a = std::clamp(b.x_a, 0.0, 1.0);
        b.x_b = std::clamp(b.x_b, 0.0, 1.0);
        return {TerminalReason::Kind::ExitedDomain, -1, b};
      }
      if (clamp_runs) {
        if (over <= cfg.clamp_tol) {
          y_new.x_a = std::clamp(y_new.x_a, 0.0, 1.0);
          y_new.x_b = std::clamp(y_new.x_b, 0.0, 1.0);
          k7_new = f.eval(y_new, side);
        } else {
          obs(t + h_accept, y_new);
          return {TerminalReason::Kind::ExitedDomain, -1, y_new};
        }
      }
    }

    t += h_accept;
    y = y_new;
    k1 = k7_new;
    if (f.piecewise()) {
      const int new_side = diagonal_side(y);
      if (side_flips || new_side != side) {
        side = new_side;
        k1 = f.eval(y, side);
      }
    }
    obs(t, y);

    if (int a = check_attractors(y); a >= 0)
      return {TerminalReason::Kind::ConvergedToAttractor, a, {}};

    const double fac =
        err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h = sign * std::min(std::abs(h) * fac, cfg.max_step);
  }
  return {TerminalReason::Kind::ReachedTMax, -1, {}};
}

} // namespace detail

/// Advances a trajectory from x0 and records every accepted step.
inline Trajectory integrate(PhasePoint x0, const EpidemicParams& params,
                            const Regime& regime, const IntegratorConfig& cfg,
                            Direction dir, const StopCondition& stop) {
  Trajectory traj;
  traj.terminal = detail::integrate_core(
      x0, params, regime, cfg, dir, stop,
      [&](double t, PhasePoint p) { traj.samples.push_back({t, p}); });
  return traj;
}

/// Terminal state only (no sample recording); used by basin classification.
inline TerminalReason integrate_terminal(PhasePoint x0,
                                         const EpidemicParams& params,
                                         const Regime& regime,
                                         const IntegratorConfig& cfg,
                                         Direction dir,
                                         const StopCondition& stop) {
  return detail::integrate_core(x0, params, regime, cfg, dir, stop,
                                [](double, PhasePoint) {});
}

enum class BoundaryEdge { Bottom, Right, Top, Left };

namespace detail {

// Signed inside-distance from an edge (>= 0 inside the square).
inline double edge_gap(PhasePoint p, BoundaryEdge e) {
  switch (e) {
    case BoundaryEdge::Bottom: return p.x_b;
    case BoundaryEdge::Right: return 1.0 - p.x_a;
    case BoundaryEdge::Top: return 1.0 - p.x_b;
    default: return p.x_a;
  }
}

inline PhasePoint snap_to_edge(PhasePoint p, BoundaryEdge e) {
  switch (e) {
    case BoundaryEdge::Bottom: p.x_b = 0.0; break;
    case BoundaryEdge::Right: p.x_a = 1.0; break;
    case BoundaryEdge::Top: p.x_b = 1.0; break;
    default: p.x_a = 0.0; break;
  }
  return p;
}

} // namespace detail

/// Resolves the point where a trajectory crosses the given boundary edge,
/// by bisection on the linear interpolation between the bracketing
/// samples, until the crossing coordinate is within 1e-10 of the edge.
inline PhasePoint refine_boundary_crossing(const Trajectory& traj,
                                           BoundaryEdge edge) {
  for (std::size_t i = 0; i + 1 < traj.samples.size(); ++i) {
    const PhasePoint p0 = traj.samples[i].p;
    const PhasePoint p1 = traj.samples[i + 1].p;
    if (detail::edge_gap(p0, edge) >= 0.0 && detail::edge_gap(p1, edge) < 0.0) {
      double lo = 0.0, hi = 1.0;
      PhasePoint mid_pt = p1;
      while (true) {
        const double mid = 0.5 * (lo + hi);
        mid_pt = p0 + mid * (p1 - p0);
        const double g = detail::edge_gap(mid_pt, edge);
        if (std::abs(g) <= 1e-10 || hi - lo < 1e-16) break;
        (g > 0.0 ? lo : hi) = mid;
      }
      return detail::snap_to_edge(mid_pt, edge);
    }
  }
  throw NoCrossing("no bracketing sample pair for requested edge");
}

/// CSV export: header `t,x_a,x_b`, 17-significant-digit decimals.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,x_a,x_b\n";
  char buf[128];
  for (const auto& s : traj.samples) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", s.t, s.p.x_a,
                  s.p.x_b);
    os << buf;
  }
}

} // namespace twinisle

#endif
