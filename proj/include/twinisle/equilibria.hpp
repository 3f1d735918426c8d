#ifndef TWINISLE_EQUILIBRIA_HPP
#define TWINISLE_EQUILIBRIA_HPP

/*
  Fixed points, Jacobians and stability classes.

  The 2x2 eigenproblems are solved in closed form (trace/determinant); all
  spectra at the analyzed points are real. Roots are located by damped-free
  Newton iteration from a seed grid, deduplicated, and classified from the
  Jacobian of the smooth piece that governs the off-diagonal behavior.
*/

#include <array>
#include <cmath>
#include <vector>

#include "model.hpp"
#include "types.hpp"

namespace twinisle {

using Matrix2 = std::array<std::array<double, 2>, 2>;

enum class StabilityClass { StableNode, Saddle, Source };

inline const char* to_string(StabilityClass c) {
  switch (c) {
    case StabilityClass::StableNode: return "stable_node";
    case StabilityClass::Saddle: return "saddle";
    default: return "source";
  }
}

struct EigenPair {
  double value = 0.0;
  PhasePoint vector; // unit length, second component >= 0
};

struct EquilibriumInfo {
  PhasePoint location;
  std::array<EigenPair, 2> eigen; // ordered by descending eigenvalue
  StabilityClass cls = StabilityClass::StableNode;
};

enum class JacobianPiece { PieceSub, PieceSuper, Autarky };

/// Exact analytic Jacobian of the polynomial piece at the given point.
inline Matrix2 jacobian_closed_form(PhasePoint at, const EpidemicParams& params,
                                    JacobianPiece piece) {
  if (piece == JacobianPiece::Autarky) {
    return {{{single_location_rhs_prime(at.x_a, params.nu_a(), params.q_a()),
              0.0},
             {0.0,
              single_location_rhs_prime(at.x_b, params.nu_b(), params.q_b())}}};
  }
  params.require_symmetric("jacobian_closed_form");
  const double nu = params.nu(), q = params.q();
  if (piece == JacobianPiece::PieceSuper) {
    Matrix2 m = jacobian_closed_form(at.swapped(), params,
                                     JacobianPiece::PieceSub);
    return {{{m[1][1], m[1][0]}, {m[0][1], m[0][0]}}};
  }
  const double xa = at.x_a, xb = at.x_b;
  const double u = 1.0 - xa + xb;
  const double d = xa - xb;
  const double w = xa + xb - 2.0 * xa * xb;
  const double fa = single_location_rhs(xa, nu, q);
  return {{{-2.0 * u * fa + u * u * single_location_rhs_prime(xa, nu, q) -
                (2.0 * xa - xb),
            2.0 * u * fa + xa},
           {nu * ((1.0 - 2.0 * xb) * d + w),
            single_location_rhs_prime(xb, nu, q) +
                nu * ((1.0 - 2.0 * xa) * d - w)}}};
}

/// Closed-form eigen-decomposition of a 2x2 matrix with real spectrum.
/// Result ordered by descending eigenvalue; eigenvectors unit length with
/// second component >= 0 (first >= 0 when the second vanishes).
inline std::array<EigenPair, 2> eigen2x2(const Matrix2& m) {
  const double tr = m[0][0] + m[1][1];
  const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  double disc = tr * tr - 4.0 * det;
  if (disc < 0.0) disc = 0.0; // real spectra only; absorb rounding
  const double s = std::sqrt(disc);
  const std::array<double, 2> lambda = {0.5 * (tr + s), 0.5 * (tr - s)};

  std::array<EigenPair, 2> out;
  for (int k = 0; k < 2; ++k) {
    const double l = lambda[k];
    // rows of (M - l I) are both orthogonal to the eigenvector; take the
    // better-conditioned of the two null-space candidates
    PhasePoint c1{m[0][1], l - m[0][0]};
    PhasePoint c2{l - m[1][1], m[1][0]};
    PhasePoint v = norm(c1) >= norm(c2) ? c1 : c2;
    if (norm(v) == 0.0) v = (k == 0) ? PhasePoint{1, 0} : PhasePoint{0, 1};
    const double n = norm(v);
    v = {v.x_a / n, v.x_b / n};
    if (v.x_b < 0.0 || (v.x_b == 0.0 && v.x_a < 0.0)) v = {-v.x_a, -v.x_b};
    out[k] = {l, v};
  }
  return out;
}

inline StabilityClass classify(const std::array<EigenPair, 2>& e) {
  if (e[0].value < 0.0) return StabilityClass::StableNode;
  if (e[1].value > 0.0) return StabilityClass::Source;
  return StabilityClass::Saddle;
}

/// Unit tangent of the stable manifold of the saddle (q,q), on the
/// requested side of the diagonal.
enum class SaddleSide { Sub, Super };

inline PhasePoint saddle_stable_direction(const EpidemicParams& params,
                                          SaddleSide side) {
  params.require_symmetric("saddle_stable_direction");
  const double s = 2.0 * (1.0 - params.q()) * params.nu();
  PhasePoint v = side == SaddleSide::Sub ? PhasePoint{1.0 / (-s), 1.0}
                                         : PhasePoint{-s, 1.0};
  const double n = norm(v);
  return {v.x_a / n, v.x_b / n};
}

struct EquilibriaResult {
  std::vector<EquilibriumInfo> equilibria;
  std::vector<PhasePoint> unconverged_seeds; // non-fatal, reported
};

namespace detail {

struct NewtonOutcome {
  PhasePoint root;
  bool converged = false;
};

template <class Field, class Jac>
NewtonOutcome newton2d(PhasePoint x0, Field&& f, Jac&& jac,
                       double tol = 1e-12, int max_iter = 50) {
  PhasePoint x = x0;
  for (int it = 0; it < max_iter; ++it) {
    const PhasePoint v = f(x);
    const Matrix2 j = jac(x);
    const double det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    if (det == 0.0 || !std::isfinite(det)) return {x, false};
    const double dx = (-v.x_a * j[1][1] + v.x_b * j[0][1]) / det;
    const double dy = (-v.x_b * j[0][0] + v.x_a * j[1][0]) / det;
    x = {x.x_a + dx, x.x_b + dy};
    if (!std::isfinite(x.x_a) || !std::isfinite(x.x_b)) return {x, false};
    if (std::hypot(dx, dy) <= tol) return {x, true};
  }
  return {x, false};
}

inline Matrix2 numeric_jacobian(const EpidemicParams& params,
                                const Regime& regime, PhasePoint at,
                                double h = 1e-7) {
  Matrix2 m{};
  const PhasePoint fxp = field({at.x_a + h, at.x_b}, params, regime);
  const PhasePoint fxm = field({at.x_a - h, at.x_b}, params, regime);
  const PhasePoint fyp = field({at.x_a, at.x_b + h}, params, regime);
  const PhasePoint fym = field({at.x_a, at.x_b - h}, params, regime);
  m[0][0] = (fxp.x_a - fxm.x_a) / (2 * h);
  m[0][1] = (fyp.x_a - fym.x_a) / (2 * h);
  m[1][0] = (fxp.x_b - fxm.x_b) / (2 * h);
  m[1][1] = (fyp.x_b - fym.x_b) / (2 * h);
  return m;
}

inline void push_unique(std::vector<PhasePoint>& roots, PhasePoint r,
                        double tol = 1e-8) {
  for (const auto& known : roots)
    if (distance(known, r) <= tol) return;
  roots.push_back(r);
}

} // namespace detail

/// Locates the fixed points of a regime from an n x n seed grid over the
/// unit square and classifies them. For LinearGlobalized, Newton runs on
/// the smooth piece matching each seed's region and the classification
/// Jacobian is the sub-diagonal piece (it governs the transverse
/// stability; the diagonal restriction would miss the saddle direction).
inline EquilibriaResult find_equilibria(const EpidemicParams& params,
                                        const Regime& regime,
                                        int seed_grid_n = 11) {
  EquilibriaResult result;
  const bool globalized = std::holds_alternative<LinearGlobalized>(regime);
  const bool autarky = std::holds_alternative<Autarky>(regime);
  if (globalized) params.require_symmetric("find_equilibria");

  if (std::holds_alternative<SingleLocation>(regime)) {
    // 1-D problem; roots reported as diagonal embeddings (x*, x*) with the
    // doubled eigenvalue f'(x*), so stability matches the scalar dynamics
    std::vector<double> roots;
    for (int i = 0; i < seed_grid_n; ++i) {
      double x = seed_grid_n == 1 ? 0.5 : double(i) / (seed_grid_n - 1);
      bool converged = false;
      for (int it = 0; it < 50; ++it) {
        const double fp = single_location_rhs_prime(x, params.nu_a(),
                                                    params.q_a());
        if (fp == 0.0) break;
        const double step = single_location_rhs(x, params.nu_a(),
                                                params.q_a()) / fp;
        x -= step;
        if (std::abs(step) <= 1e-12) { converged = true; break; }
      }
      if (!converged || x < -1e-6 || x > 1.0 + 1e-6) {
        if (!converged)
          result.unconverged_seeds.push_back(
              {double(i) / std::max(seed_grid_n - 1, 1), 0.0});
        continue;
      }
      bool dup = false;
      for (double r : roots)
        if (std::abs(r - x) <= 1e-8) dup = true;
      if (dup) continue;
      roots.push_back(x);
      const double fp = single_location_rhs_prime(x, params.nu_a(),
                                                  params.q_a());
      EquilibriumInfo info;
      info.location = {x, x};
      info.eigen = eigen2x2({{{fp, 0.0}, {0.0, fp}}});
      info.cls = classify(info.eigen);
      result.equilibria.push_back(info);
    }
  } else {
    std::vector<PhasePoint> roots;
    for (int i = 0; i < seed_grid_n; ++i) {
      for (int j = 0; j < seed_grid_n; ++j) {
        const PhasePoint seed{double(i) / (seed_grid_n - 1),
                              double(j) / (seed_grid_n - 1)};
        detail::NewtonOutcome out;
        int region = 0; // -1 sub seed, +1 super seed, 0 diagonal
        if (globalized) {
          const double d = seed.x_a - seed.x_b;
          region = d > 0.0 ? -1 : (d < 0.0 ? 1 : 0);
          const Regime piece = region < 0
                                   ? Regime{PieceSub{}}
                                   : (region > 0 ? Regime{PieceSuper{}}
                                                 : Regime{PieceDiagonal{}});
          const JacobianPiece jp = region > 0 ? JacobianPiece::PieceSuper
                                              : JacobianPiece::PieceSub;
          out = detail::newton2d(
              seed,
              [&](PhasePoint p) { return field(p, params, piece); },
              [&](PhasePoint p) {
                return region == 0
                           ? jacobian_closed_form(p, params,
                                                  JacobianPiece::Autarky)
                           : jacobian_closed_form(p, params, jp);
              });
        } else if (autarky) {
          out = detail::newton2d(
              seed, [&](PhasePoint p) { return field(p, params, regime); },
              [&](PhasePoint p) {
                return jacobian_closed_form(p, params, JacobianPiece::Autarky);
              });
        } else {
          out = detail::newton2d(
              seed, [&](PhasePoint p) { return field(p, params, regime); },
              [&](PhasePoint p) {
                return detail::numeric_jacobian(params, regime, p);
              });
        }
        if (!out.converged) {
          result.unconverged_seeds.push_back(seed);
          continue;
        }
        const PhasePoint r = out.root;
        if (r.x_a < -1e-6 || r.x_a > 1.0 + 1e-6 || r.x_b < -1e-6 ||
            r.x_b > 1.0 + 1e-6)
          continue;
        if (globalized) {
          // a root found on a piece only counts inside that piece's closure
          const double d = r.x_a - r.x_b;
          if (region < 0 && d < -1e-8) continue;
          if (region > 0 && d > 1e-8) continue;
        }
        detail::push_unique(roots, r);
      }
    }
    for (const auto& r : roots) {
      EquilibriumInfo info;
      info.location = r;
      Matrix2 j;
      if (globalized)
        j = jacobian_closed_form(r, params, JacobianPiece::PieceSub);
      else if (autarky ||
               std::holds_alternative<PieceDiagonal>(regime))
        j = jacobian_closed_form(r, params, JacobianPiece::Autarky);
      else if (std::holds_alternative<PieceSub>(regime))
        j = jacobian_closed_form(r, params, JacobianPiece::PieceSub);
      else if (std::holds_alternative<PieceSuper>(regime))
        j = jacobian_closed_form(r, params, JacobianPiece::PieceSuper);
      else
        j = detail::numeric_jacobian(params, regime, r);
      info.eigen = eigen2x2(j);
      info.cls = classify(info.eigen);
      result.equilibria.push_back(info);
    }
  }

  std::sort(result.equilibria.begin(), result.equilibria.end(),
            [](const EquilibriumInfo& a, const EquilibriumInfo& b) {
              if (a.location.x_a != b.location.x_a)
                return a.location.x_a < b.location.x_a;
              return a.location.x_b < b.location.x_b;
            });
  return result;
}

} // namespace twinisle

#endif
