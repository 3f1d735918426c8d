#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include <twinisle/shocks.hpp>

using namespace twinisle;

TEST_CASE("shock categories at anchor points") {
  const auto p = symmetric_params(0.7, 0.4);
  CHECK(classify_shock({0.1, 0.1}, p).category == ShockCategory::BothRecover);
  CHECK(classify_shock({0.9, 0.9}, p).category == ShockCategory::BothInfected);
  // asymmetric shock just past q in one location: autarky keeps it endemic
  // there, the coupled flow pulls it back
  CHECK(classify_shock({0.45, 0.05}, p).category ==
        ShockCategory::GlobAdvantage);
  // strong asymmetric shock: the coupled flow drags the healthy location down
  CHECK(classify_shock({0.9, 0.3}, p).category ==
        ShockCategory::GlobDisadvantage);
}

TEST_CASE("categories are symmetric under swapping the locations") {
  const auto p = symmetric_params(0.7, 0.4);
  for (const auto& s : {PhasePoint{0.45, 0.05}, {0.9, 0.3}, {0.3, 0.8},
                        {0.62, 0.17}}) {
    CHECK(classify_shock(s, p).category ==
          classify_shock(s.swapped(), p).category);
  }
}

TEST_CASE("trivial quadrants are exact") {
  const auto p = symmetric_params(0.7, 0.4);
  // everything strictly inside [0,q)^2 recovers in both regimes, everything
  // strictly inside (q,1]^2 above the separatrix stays infected in both
  for (double a : {0.05, 0.15, 0.3}) {
    for (double b : {0.08, 0.22, 0.37}) {
      CHECK(classify_shock({a, b}, p).category == ShockCategory::BothRecover);
      CHECK(classify_shock({1.0 - a * 0.3, 1.0 - b * 0.3}, p).category ==
            ShockCategory::BothInfected);
    }
  }
}

TEST_CASE("grid measures sum to one") {
  const auto p = symmetric_params(0.7, 0.4);
  const auto m = category_measures(p, ShockEstimator::grid(21));
  double total = 0.0;
  for (const auto& [c, v] : m.measure) total += v;
  CHECK(total == Catch::Approx(1.0).margin(1e-12));
  CHECK(m.outcomes.size() == 21 * 21);
  CHECK(m.measure.at(ShockCategory::Indeterminate) == 0.0);
}

TEST_CASE("monte carlo measures are seed deterministic") {
  const auto p = symmetric_params(0.7, 0.4);
  const auto a = category_measures(p, ShockEstimator::monte_carlo(2000, 7));
  const auto b = category_measures(p, ShockEstimator::monte_carlo(2000, 7));
  CHECK(a.measure == b.measure);
  REQUIRE(a.outcomes.size() == 2000);
  CHECK(a.outcomes[123].shock.x_a == b.outcomes[123].shock.x_a);
}

TEST_CASE("shocks CSV format") {
  std::vector<ShockOutcome> outcomes(1);
  outcomes[0].shock = {0.25, 0.75};
  outcomes[0].autarky_label = BasinLabel::ToZeroOne;
  outcomes[0].globalized_label = BasinLabel::ToOrigin;
  outcomes[0].category = ShockCategory::GlobAdvantage;
  std::ostringstream os;
  write_shocks_csv(os, outcomes);
  CHECK(os.str() ==
        "s_a,s_b,autarky,globalized,category\n"
        "0.25,0.75,zero_one,origin,glob_advantage\n");
}
