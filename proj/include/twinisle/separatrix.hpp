#ifndef TWINISLE_SEPARATRIX_HPP
#define TWINISLE_SEPARATRIX_HPP

/*
  Stable-manifold tracing of the saddle (q,q).

  The trace starts from an eigenvector offset and integrates backward in
  time on the smooth piece of the requested side until the unit square is
  exited; the exit is then refined to the boundary crossing. The offset
  default 1e-6 trades the O(offset^2) linearization error against slow
  escape from the saddle.
*/

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "equilibria.hpp"
#include "integrator.hpp"
#include "model.hpp"
#include "types.hpp"

namespace twinisle {

class ExitThroughUnexpectedEdge : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct SeparatrixExit {
  enum class Type { Eta, Zeta } type = Type::Eta;
  double value = 0.0;
};

struct SeparatrixTrace {
  SaddleSide side = SaddleSide::Sub;
  std::vector<PhasePoint> polyline; // ordered near-saddle -> boundary exit
  SeparatrixExit exit;
};

/// Traces the stable separatrix on one side of the diagonal.
/// Sub traces exit through [q,1]x{0} (Eta, x_a at crossing) or {1}x[0,q]
/// (Zeta, x_b at crossing); Super traces are the mirrored cases.
inline SeparatrixTrace trace_separatrix(const EpidemicParams& params,
                                        SaddleSide side, double offset = 1e-6,
                                        IntegratorConfig cfg = {}) {
  params.require_symmetric("trace_separatrix");
  if (!(offset >= 1e-9 && offset <= 1e-3))
    throw std::invalid_argument("trace_separatrix: offset outside [1e-9,1e-3]");
  const double q = params.q();

  PhasePoint dir = saddle_stable_direction(params, side);
  // orient the offset into the requested region
  const double want = side == SaddleSide::Sub ? 1.0 : -1.0;
  if ((dir.x_a - dir.x_b) * want < 0.0) dir = {-dir.x_a, -dir.x_b};
  const PhasePoint x0 = PhasePoint{q, q} + offset * dir;

  const Regime piece =
      side == SaddleSide::Sub ? Regime{PieceSub{}} : Regime{PieceSuper{}};
  StopCondition stop;
  stop.stop_on_domain_exit = true;

  const Trajectory traj =
      integrate(x0, params, piece, cfg, Direction::Backward, stop);
  if (traj.terminal.kind != TerminalReason::Kind::ExitedDomain)
    throw ExitThroughUnexpectedEdge(
        "separatrix trace did not exit the unit square");

  const PhasePoint out = traj.samples.back().p;
  SeparatrixTrace trace;
  trace.side = side;
  for (std::size_t i = 0; i + 1 < traj.samples.size(); ++i)
    trace.polyline.push_back(traj.samples[i].p);

  PhasePoint crossing;
  if (side == SaddleSide::Sub) {
    if (out.x_b < 0.0) {
      crossing = refine_boundary_crossing(traj, BoundaryEdge::Bottom);
      trace.exit = {SeparatrixExit::Type::Eta, crossing.x_a};
    } else if (out.x_a > 1.0) {
      crossing = refine_boundary_crossing(traj, BoundaryEdge::Right);
      trace.exit = {SeparatrixExit::Type::Zeta, crossing.x_b};
    } else {
      throw ExitThroughUnexpectedEdge("sub trace left through the wrong edge");
    }
  } else {
    if (out.x_a < 0.0) {
      crossing = refine_boundary_crossing(traj, BoundaryEdge::Left);
      trace.exit = {SeparatrixExit::Type::Eta, crossing.x_b};
    } else if (out.x_b > 1.0) {
      crossing = refine_boundary_crossing(traj, BoundaryEdge::Top);
      trace.exit = {SeparatrixExit::Type::Zeta, crossing.x_a};
    } else {
      throw ExitThroughUnexpectedEdge(
          "super trace left through the wrong edge");
    }
  }
  trace.polyline.push_back(crossing);
  return trace;
}

struct SweepEntry {
  double q = 0.0;
  SeparatrixExit exit;
};

struct SweepFailure {
  double q = 0.0;
  std::string message;
};

struct EtaZetaSweep {
  std::vector<SweepEntry> entries; // ordered by q
  std::vector<SweepFailure> failures;
  std::optional<double> threshold; // q* where Eta flips to Zeta
};

/// One Sub trace per q, ordered by q; when the exit type flips between
/// adjacent points the switch q* is resolved by bisection to 1e-3.
inline EtaZetaSweep eta_zeta_sweep(double nu, std::vector<double> q_values,
                                   IntegratorConfig cfg = {}) {
  std::sort(q_values.begin(), q_values.end());
  EtaZetaSweep sweep;
  for (double q : q_values) {
    try {
      const auto params = EpidemicParams::symmetric_params(nu, q);
      const auto trace = trace_separatrix(params, SaddleSide::Sub, 1e-6, cfg);
      sweep.entries.push_back({q, trace.exit});
    } catch (const std::exception& e) {
      sweep.failures.push_back({q, e.what()});
    }
  }
  for (std::size_t i = 0; i + 1 < sweep.entries.size(); ++i) {
    if (sweep.entries[i].exit.type == SeparatrixExit::Type::Eta &&
        sweep.entries[i + 1].exit.type == SeparatrixExit::Type::Zeta) {
      double lo = sweep.entries[i].q, hi = sweep.entries[i + 1].q;
      while (hi - lo > 1e-3) {
        const double mid = 0.5 * (lo + hi);
        try {
          const auto params = EpidemicParams::symmetric_params(nu, mid);
          const auto t = trace_separatrix(params, SaddleSide::Sub, 1e-6, cfg);
          (t.exit.type == SeparatrixExit::Type::Eta ? lo : hi) = mid;
        } catch (const std::exception&) {
          break;
        }
      }
      sweep.threshold = 0.5 * (lo + hi);
      break;
    }
  }
  return sweep;
}

inline const char* to_string(SeparatrixExit::Type t) {
  return t == SeparatrixExit::Type::Eta ? "eta" : "zeta";
}

inline void write_sweep_csv(std::ostream& os, const EtaZetaSweep& sweep) {
  os << "q,exit_type,exit_value\n";
  char buf[96];
  for (const auto& e : sweep.entries) {
    std::snprintf(buf, sizeof buf, "%.17g,%s,%.17g\n", e.q,
                  to_string(e.exit.type), e.exit.value);
    os << buf;
  }
}

inline void write_polyline_csv(std::ostream& os,
                               const std::vector<PhasePoint>& polyline) {
  os << "x_a,x_b\n";
  char buf[96];
  for (const auto& p : polyline) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.x_a, p.x_b);
    os << buf;
  }
}

} // namespace twinisle

#endif
