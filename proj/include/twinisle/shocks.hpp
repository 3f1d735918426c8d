#ifndef TWINISLE_SHOCKS_HPP
#define TWINISLE_SHOCKS_HPP

/*
  Shock taxonomy: each shock (an initial condition on [0,1]^2) is labeled
  under both regimes and bucketed into the four-way comparison between
  autarky and globalization. The autarky label comes from the closed-form
  rectangle oracle (falling back to integration only on the q-lines); the
  globalized label from forward integration.
*/

#include <cstdio>
#include <map>
#include <ostream>
#include <random>
#include <vector>

#include "basins.hpp"

namespace twinisle {

enum class ShockCategory {
  BothRecover,
  BothInfected,
  GlobAdvantage,    // autarky partial endemic, globalized recovers
  GlobDisadvantage, // autarky partial endemic, globalized fully infected
  Indeterminate
};

inline const char* to_string(ShockCategory c) {
  switch (c) {
    case ShockCategory::BothRecover: return "both_recover";
    case ShockCategory::BothInfected: return "both_infected";
    case ShockCategory::GlobAdvantage: return "glob_advantage";
    case ShockCategory::GlobDisadvantage: return "glob_disadvantage";
    default: return "indeterminate";
  }
}

struct ShockOutcome {
  PhasePoint shock;
  BasinLabel autarky_label = BasinLabel::Unresolved;
  BasinLabel globalized_label = BasinLabel::Unresolved;
  ShockCategory category = ShockCategory::Indeterminate;
};

namespace detail {

inline ShockCategory categorize(BasinLabel autarky, BasinLabel globalized) {
  const bool partial = autarky == BasinLabel::ToZeroOne ||
                       autarky == BasinLabel::ToOneZero;
  if (autarky == BasinLabel::ToOrigin && globalized == BasinLabel::ToOrigin)
    return ShockCategory::BothRecover;
  if (autarky == BasinLabel::ToOne && globalized == BasinLabel::ToOne)
    return ShockCategory::BothInfected;
  if (partial && globalized == BasinLabel::ToOrigin)
    return ShockCategory::GlobAdvantage;
  if (partial && globalized == BasinLabel::ToOne)
    return ShockCategory::GlobDisadvantage;
  return ShockCategory::Indeterminate;
}

} // namespace detail

inline ShockOutcome classify_shock(PhasePoint s, const EpidemicParams& params,
                                   const IntegratorConfig& cfg,
                                   const AttractorSet& glob_attractors,
                                   const AttractorSet& aut_attractors) {
  params.require_symmetric("classify_shock");
  ShockOutcome out;
  out.shock = s;
  try {
    out.autarky_label = autarky_oracle(s, params.q(), 1e-6);
  } catch (const OnBoundary&) {
    out.autarky_label =
        classify_point(s, params, Autarky{}, cfg, aut_attractors);
  }
  out.globalized_label =
      classify_point(s, params, LinearGlobalized{}, cfg, glob_attractors);
  out.category = detail::categorize(out.autarky_label, out.globalized_label);
  return out;
}

inline ShockOutcome classify_shock(PhasePoint s, const EpidemicParams& params,
                                   const IntegratorConfig& cfg = {}) {
  return classify_shock(s, params, cfg,
                        AttractorSet::compute(params, LinearGlobalized{}),
                        AttractorSet::compute(params, Autarky{}));
}

struct ShockEstimator {
  enum class Kind { Grid, MonteCarlo } kind = Kind::Grid;
  int n = 101;                   // Grid: n x n cell centers
  int samples = 100000;          // MonteCarlo
  unsigned long long seed = 42;  // MonteCarlo

  static ShockEstimator grid(int n) { return {Kind::Grid, n, 0, 0}; }
  static ShockEstimator monte_carlo(int samples, unsigned long long seed) {
    return {Kind::MonteCarlo, 0, samples, seed};
  }
};

struct ShockMeasures {
  std::map<ShockCategory, double> measure; // sums to 1 within resolution
  std::vector<ShockOutcome> outcomes;      // one per sampled shock
};

/// Category measures over uniform shocks, by cell-center grid or seeded
/// Monte Carlo. Deterministic for a fixed seed and independent of the
/// worker count.
inline ShockMeasures category_measures(const EpidemicParams& params,
                                       const ShockEstimator& est,
                                       const IntegratorConfig& cfg = {}) {
  params.require_symmetric("category_measures");
  std::vector<PhasePoint> shocks;
  if (est.kind == ShockEstimator::Kind::Grid) {
    if (est.n < 2)
      throw std::invalid_argument("category_measures: grid n must be >= 2");
    shocks.reserve(static_cast<std::size_t>(est.n) * est.n);
    for (int j = 0; j < est.n; ++j)
      for (int i = 0; i < est.n; ++i)
        shocks.push_back({(i + 0.5) / est.n, (j + 0.5) / est.n});
  } else {
    if (est.samples < 1)
      throw std::invalid_argument("category_measures: samples must be >= 1");
    std::mt19937_64 rng(est.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    shocks.resize(static_cast<std::size_t>(est.samples));
    for (auto& s : shocks) {
      s.x_a = u(rng);
      s.x_b = u(rng);
    }
  }

  const AttractorSet glob = AttractorSet::compute(params, LinearGlobalized{});
  const AttractorSet aut = AttractorSet::compute(params, Autarky{});
  ShockMeasures result;
  result.outcomes.resize(shocks.size());
  parallel_for(shocks.size(), [&](std::size_t k) {
    result.outcomes[k] = classify_shock(shocks[k], params, cfg, glob, aut);
  });

  for (ShockCategory c :
       {ShockCategory::BothRecover, ShockCategory::BothInfected,
        ShockCategory::GlobAdvantage, ShockCategory::GlobDisadvantage,
        ShockCategory::Indeterminate})
    result.measure[c] = 0.0;
  for (const auto& o : result.outcomes)
    result.measure[o.category] += 1.0 / double(shocks.size());
  return result;
}

/// CSV: `s_a,s_b,autarky,globalized,category`.
inline void write_shocks_csv(std::ostream& os,
                             const std::vector<ShockOutcome>& outcomes) {
  os << "s_a,s_b,autarky,globalized,category\n";
  char buf[160];
  for (const auto& o : outcomes) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%s,%s,%s\n", o.shock.x_a,
                  o.shock.x_b, to_string(o.autarky_label),
                  to_string(o.globalized_label), to_string(o.category));
    os << buf;
  }
}

} // namespace twinisle

#endif
