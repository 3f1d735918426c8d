#ifndef TWINISLE_TYPES_HPP
#define TWINISLE_TYPES_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace twinisle {

/// Thrown when a symmetric-only regime is evaluated with asymmetric parameters.
class RegimeParamMismatch : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A state (x_a, x_b) of the planar system. Also used for shock vectors
/// and for directions (where the unit-interval bounds do not apply).
struct PhasePoint {
  double x_a = 0.0;
  double x_b = 0.0;

  PhasePoint() = default;
  PhasePoint(double a, double b) : x_a(a), x_b(b) {}

  PhasePoint swapped() const { return {x_b, x_a}; }

  friend PhasePoint operator+(PhasePoint p, PhasePoint q) {
    return {p.x_a + q.x_a, p.x_b + q.x_b};
  }
  friend PhasePoint operator-(PhasePoint p, PhasePoint q) {
    return {p.x_a - q.x_a, p.x_b - q.x_b};
  }
  friend PhasePoint operator*(double s, PhasePoint p) {
    return {s * p.x_a, s * p.x_b};
  }
};

inline double norm(PhasePoint p) { return std::hypot(p.x_a, p.x_b); }

inline double distance(PhasePoint p, PhasePoint q) { return norm(p - q); }

/// Contagiousness and quarantine parameters of the two locations.
/// All four values must lie strictly inside (0,1).
class EpidemicParams {
public:
  EpidemicParams(double nu_a, double nu_b, double q_a, double q_b)
      : nu_a_(nu_a), nu_b_(nu_b), q_a_(q_a), q_b_(q_b) {
    check("nu_a", nu_a);
    check("nu_b", nu_b);
    check("q_a", q_a);
    check("q_b", q_b);
  }

  /// Symmetric instance: nu_a = nu_b = nu, q_a = q_b = q.
  static EpidemicParams symmetric_params(double nu, double q) {
    return EpidemicParams(nu, nu, q, q);
  }

  double nu_a() const { return nu_a_; }
  double nu_b() const { return nu_b_; }
  double q_a() const { return q_a_; }
  double q_b() const { return q_b_; }

  /// nu and q of the symmetric case; callers must check symmetric() first.
  double nu() const { return nu_a_; }
  double q() const { return q_a_; }

  bool symmetric() const { return nu_a_ == nu_b_ && q_a_ == q_b_; }

  void require_symmetric(const char* where) const {
    if (!symmetric())
      throw RegimeParamMismatch(std::string(where) +
                                ": regime requires symmetric parameters");
  }

private:
  static void check(const char* name, double v) {
    if (!(v > 0.0) || !(v < 1.0) || !std::isfinite(v))
      throw std::invalid_argument(std::string(name) +
                                  " must lie strictly inside (0,1)");
  }

  double nu_a_, nu_b_, q_a_, q_b_;
};

inline EpidemicParams symmetric_params(double nu, double q) {
  return EpidemicParams::symmetric_params(nu, q);
}

} // namespace twinisle

#endif
