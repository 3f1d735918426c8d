#ifndef TWINISLE_LINEAR_APPROX_HPP
#define TWINISLE_LINEAR_APPROX_HPP

/*
  Closed-form geometry of the linearized separatrix.

  The two-piece line through (q,q) with slopes -2(1-q)nu (sub-diagonal
  branch) and its reciprocal approximates the separatrix to first order.
  Depending on whether nu exceeds q/(2(1-q)^2), the region cut from the
  rectangle [q,1]x[0,q] below the line is a triangle or a trapezoid; the
  areas, the area ratios, their comparative-statics derivatives and the
  total recovery-basin area all have closed forms.
*/

#include <cmath>
#include <stdexcept>

#include "types.hpp"

namespace twinisle {

class AtBoundary : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Two-piece linear approximation of the separatrix through (q,q).
struct LinearSeparatrix {
  double slope_sub;   // -2(1-q)nu, branch for x_a >= q
  double slope_super; // 1/slope_sub, branch for x_a <= q
  PhasePoint anchor;  // (q,q)

  explicit LinearSeparatrix(const EpidemicParams& params)
      : slope_sub(-2.0 * (1.0 - params.q()) * params.nu()),
        slope_super(1.0 / slope_sub),
        anchor{params.q(), params.q()} {
    params.require_symmetric("LinearSeparatrix");
  }

  /// x_b on the line as a function of x_a (branch chosen by x_a vs q).
  double at(double x_a) const {
    const double slope = x_a >= anchor.x_a ? slope_sub : slope_super;
    return slope * (x_a - anchor.x_a) + anchor.x_b;
  }

  /// Euclidean distance from a point to the sub-diagonal branch line.
  double distance_sub(PhasePoint p) const {
    // line: slope_sub * (x_a - q) - (x_b - q) = 0
    return std::abs(slope_sub * (p.x_a - anchor.x_a) - (p.x_b - anchor.x_b)) /
           std::hypot(slope_sub, -1.0);
  }
};

enum class RegionCase { Triangle, Trapezoid, Boundary };

inline const char* to_string(RegionCase c) {
  switch (c) {
    case RegionCase::Triangle: return "triangle";
    case RegionCase::Trapezoid: return "trapezoid";
    default: return "boundary";
  }
}

/// Triangle when nu > q/(2(1-q)^2), trapezoid when below, Boundary within
/// 1e-12 of equality. The equivalent q-form of the condition,
/// (1+4nu-sqrt(8nu+1))/(4nu) < q, is evaluated as a cross-check.
inline RegionCase case_condition(const EpidemicParams& params) {
  params.require_symmetric("case_condition");
  const double nu = params.nu(), q = params.q();
  const double thr = q / (2.0 * (1.0 - q) * (1.0 - q));
  if (std::abs(nu - thr) <= 1e-12) return RegionCase::Boundary;
  const RegionCase by_nu =
      nu > thr ? RegionCase::Triangle : RegionCase::Trapezoid;
  const double q_thr = (1.0 + 4.0 * nu - std::sqrt(8.0 * nu + 1.0)) / (4.0 * nu);
  if (std::abs(q - q_thr) > 1e-9) {
    const RegionCase by_q =
        q_thr < q ? RegionCase::Trapezoid : RegionCase::Triangle;
    if (by_q != by_nu)
      throw std::logic_error("case_condition: nu-form and q-form disagree");
  }
  return by_nu;
}

/// Intersection of the sub-diagonal branch with the sub-diagonal boundary
/// of the unit square: bottom edge in the triangle case, right edge in the
/// trapezoid case (both branches coincide at (1,0) on the boundary case).
inline PhasePoint p_minus(const EpidemicParams& params) {
  const double nu = params.nu(), q = params.q();
  if (case_condition(params) == RegionCase::Trapezoid)
    return {1.0, -2.0 * nu * (1.0 - q) * (1.0 - q) + q};
  return {q / (2.0 * nu * (1.0 - q)) + q, 0.0};
}

/// Area under the linearized separatrix inside [q,1]x[0,q]:
/// q^2/(4 nu (1-q)) (triangle) or (1-q)(q - nu(1-q)^2) (trapezoid).
inline double region_area(const EpidemicParams& params) {
  const double nu = params.nu(), q = params.q();
  if (case_condition(params) == RegionCase::Trapezoid)
    return (1.0 - q) * (q - nu * (1.0 - q) * (1.0 - q));
  return q * q / (4.0 * nu * (1.0 - q));
}

/// Ratio of region_area to the rectangle area q(1-q); equals 1/2 on the
/// case boundary. Tiny negative rounding (>= -1e-15) is clamped to 0.
inline double ratio_tilde(const EpidemicParams& params) {
  const double q = params.q();
  double r = region_area(params) / (q * (1.0 - q));
  if (r < 0.0 && r >= -1e-15) r = 0.0;
  return r;
}

struct RegionGeometry {
  RegionCase region_case;
  PhasePoint p_minus;
  double area;
  double ratio;
};

inline RegionGeometry region_geometry(const EpidemicParams& params) {
  return {case_condition(params), p_minus(params), region_area(params),
          ratio_tilde(params)};
}

struct RatioDerivatives {
  double d_dq;
  double d_dnu;
};

/// Closed-form partial derivatives of ratio_tilde; undefined on the case
/// boundary (the ratio has a kink there).
inline RatioDerivatives ratio_tilde_derivatives(const EpidemicParams& params) {
  const double nu = params.nu(), q = params.q();
  const RegionCase c = case_condition(params);
  if (c == RegionCase::Boundary)
    throw AtBoundary("ratio_tilde_derivatives: on the case boundary");
  if (c == RegionCase::Triangle) {
    const double omq = 1.0 - q;
    return {(1.0 + q) / (4.0 * nu * omq * omq * omq),
            -q / (4.0 * omq * omq * nu * nu)};
  }
  const double omq = 1.0 - q;
  return {(1.0 / (q * q) - 1.0) * nu, -(omq * omq) / q};
}

/// Sign of d A(Q^-)/dq = 1 - 2q + 3 nu (1-q)^2 on the trapezoid branch.
inline bool dAQ_dq_positive(const EpidemicParams& params) {
  const double nu = params.nu(), q = params.q();
  return 1.0 - 2.0 * q + 3.0 * nu * (1.0 - q) * (1.0 - q) > 0.0;
}

/// Approximate total area of the basin of (0,0): twice the rectangle part
/// plus the diagonal square [0,q]^2.
inline double area_report_tilde(const EpidemicParams& params) {
  const double q = params.q();
  return 2.0 * region_area(params) + q * q;
}

} // namespace twinisle

#endif
