#ifndef TWINISLE_MODEL_HPP
#define TWINISLE_MODEL_HPP

/*
  Vector fields of the one- and two-location epidemic dynamics.

  The single-location dynamics is the cubic
      dx/dt = nu * x * (1-x) * (x-q).
  The coupled two-location system is driven by export fractions derived
  from a price/cost specification; its linear-uniform instance reduces to
  a piecewise-polynomial field with max{0, x_a-x_b} couplings. That field
  decomposes into three smooth pieces (diagonal, sub-diagonal,
  super-diagonal), each a polynomial defined on the whole plane which
  agrees with the assembled field on the closure of its region.

  All evaluations here are pure; domain restriction to the unit square is
  the caller's business (manifold tracing needs values slightly outside).
*/

#include <algorithm>
#include <functional>
#include <utility>
#include <variant>

#include "types.hpp"

namespace twinisle {

/// Right-hand side of the single-location cubic: nu*x*(1-x)*(x-q).
inline double single_location_rhs(double x, double nu, double q) {
  return nu * x * (1.0 - x) * (x - q);
}

/// d/dx of the cubic: nu*[(2-3x)x + q(2x-1)].
inline double single_location_rhs_prime(double x, double nu, double q) {
  return nu * ((2.0 - 3.0 * x) * x + q * (2.0 * x - 1.0));
}

/// Prices and export-cost distributions of the general two-location model.
/// Cost CDFs must be non-decreasing, 0 for non-positive arguments and <= 1.
struct PriceCostSpec {
  std::function<double(PhasePoint)> price_a;
  std::function<double(PhasePoint)> price_b;
  std::function<double(double)> cost_cdf_a;
  std::function<double(double)> cost_cdf_b;

  /// Linear utility p = 1 - x (own location), uniform costs on [0,1].
  static PriceCostSpec linear_uniform() {
    auto clamp01 = [](double c) { return std::clamp(c, 0.0, 1.0); };
    return PriceCostSpec{
        [](PhasePoint p) { return 1.0 - p.x_a; },
        [](PhasePoint p) { return 1.0 - p.x_b; },
        clamp01, clamp01};
  }
};

/// Fractions of agents willing to export, (f_a, f_b). At most one of the
/// two is nonzero (export only occurs in one direction at a time).
inline std::pair<double, double> export_fractions(PhasePoint p,
                                                  const PriceCostSpec& spec) {
  const double pa = spec.price_a(p);
  const double pb = spec.price_b(p);
  return {spec.cost_cdf_a(pb - pa), spec.cost_cdf_b(pa - pb)};
}

/// Export fractions of the linear-uniform specialization in closed form:
/// (max{0, x_a-x_b}, max{0, x_b-x_a}).
inline std::pair<double, double> export_fractions(PhasePoint p) {
  const double d = p.x_a - p.x_b;
  return {std::max(0.0, d), std::max(0.0, -d)};
}

struct SingleLocation {};
struct GeneralTwoLocation {
  PriceCostSpec spec;
};
struct LinearGlobalized {};
struct Autarky {};
struct PieceDiagonal {};
struct PieceSub {};
struct PieceSuper {};

using Regime = std::variant<SingleLocation, GeneralTwoLocation,
                            LinearGlobalized, Autarky, PieceDiagonal,
                            PieceSub, PieceSuper>;

namespace detail {

// Diagonal piece: two uncoupled cubics (also the autarky field in the
// symmetric case).
inline PhasePoint field_diagonal(PhasePoint p, double nu, double q) {
  return {single_location_rhs(p.x_a, nu, q),
          single_location_rhs(p.x_b, nu, q)};
}

// Sub-diagonal piece (export flows from A to B):
//   V_a = (1 - x_a + x_b)^2 * f(x_a) - x_a (x_a - x_b)
//   V_b = f(x_b) + nu (x_a + x_b - 2 x_a x_b)(x_a - x_b)
inline PhasePoint field_sub(PhasePoint p, double nu, double q) {
  const double u = 1.0 - p.x_a + p.x_b;
  const double d = p.x_a - p.x_b;
  const double w = p.x_a + p.x_b - 2.0 * p.x_a * p.x_b;
  return {u * u * single_location_rhs(p.x_a, nu, q) - p.x_a * d,
          single_location_rhs(p.x_b, nu, q) + nu * w * d};
}

// Super-diagonal piece, via the diagonal symmetry of the system.
inline PhasePoint field_super(PhasePoint p, double nu, double q) {
  return field_sub(p.swapped(), nu, q).swapped();
}

} // namespace detail

/// Piecewise assembly of the linear-uniform specialization: dispatches on
/// the sign of x_a - x_b. Requires symmetric parameters.
inline PhasePoint field_linear_globalized(PhasePoint p,
                                          const EpidemicParams& params) {
  params.require_symmetric("field(LinearGlobalized)");
  const double d = p.x_a - p.x_b;
  if (d > 0.0) return detail::field_sub(p, params.nu(), params.q());
  if (d < 0.0) return detail::field_super(p, params.nu(), params.q());
  return detail::field_diagonal(p, params.nu(), params.q());
}

/// General coupled system, first line = within-country spreading among
/// non-exporting agents minus the outflow of infected exporters, second
/// line = cross-country infection inflow.
inline PhasePoint field_general(PhasePoint p, const EpidemicParams& params,
                                const PriceCostSpec& spec) {
  const auto [fa, fb] = export_fractions(p, spec);
  const double xa = p.x_a, xb = p.x_b;
  const double va =
      params.nu_a() *
          (xa * (1.0 - fa) * (1.0 - xa) * (1.0 - fa) * (xa - params.q_a()) +
           xa * (1.0 - fa) * (1.0 - xb) * fb +
           (1.0 - xa) * (1.0 - fa) * xb * fb) -
      xa * fa;
  const double vb =
      params.nu_b() *
          (xb * (1.0 - fb) * (1.0 - xb) * (1.0 - fb) * (xb - params.q_b()) +
           xb * (1.0 - fb) * (1.0 - xa) * fa +
           (1.0 - xb) * (1.0 - fb) * xa * fa) -
      xb * fb;
  return {va, vb};
}

/// Autarky: two uncoupled cubics, each with its own location parameters.
inline PhasePoint field_autarky(PhasePoint p, const EpidemicParams& params) {
  return {single_location_rhs(p.x_a, params.nu_a(), params.q_a()),
          single_location_rhs(p.x_b, params.nu_b(), params.q_b())};
}

/// Time derivative (v_a, v_b) of the given regime at p.
inline PhasePoint field(PhasePoint p, const EpidemicParams& params,
                        const Regime& regime) {
  return std::visit(
      [&](const auto& r) -> PhasePoint {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, SingleLocation>) {
          // only location A exists; x_b carries no dynamics
          return {single_location_rhs(p.x_a, params.nu_a(), params.q_a()),
                  0.0};
        } else if constexpr (std::is_same_v<R, GeneralTwoLocation>) {
          return field_general(p, params, r.spec);
        } else if constexpr (std::is_same_v<R, LinearGlobalized>) {
          return field_linear_globalized(p, params);
        } else if constexpr (std::is_same_v<R, Autarky>) {
          return field_autarky(p, params);
        } else if constexpr (std::is_same_v<R, PieceDiagonal>) {
          params.require_symmetric("field(PieceDiagonal)");
          return detail::field_diagonal(p, params.nu(), params.q());
        } else if constexpr (std::is_same_v<R, PieceSub>) {
          params.require_symmetric("field(PieceSub)");
          return detail::field_sub(p, params.nu(), params.q());
        } else {
          params.require_symmetric("field(PieceSuper)");
          return detail::field_super(p, params.nu(), params.q());
        }
      },
      regime);
}

} // namespace twinisle

#endif
