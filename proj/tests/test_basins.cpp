#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include <twinisle/basins.hpp>

using namespace twinisle;

TEST_CASE("autarky oracle") {
  CHECK(autarky_oracle({0.39, 0.41}, 0.4) == BasinLabel::ToZeroOne);
  CHECK(autarky_oracle({0.41, 0.39}, 0.4) == BasinLabel::ToOneZero);
  CHECK(autarky_oracle({0.1, 0.2}, 0.4) == BasinLabel::ToOrigin);
  CHECK(autarky_oracle({0.8, 0.9}, 0.4) == BasinLabel::ToOne);
  CHECK_THROWS_AS(autarky_oracle({0.4, 0.2}, 0.4), OnBoundary);
}

TEST_CASE("attractor sets") {
  const auto p = symmetric_params(0.7, 0.4);
  const auto glob = AttractorSet::compute(p, LinearGlobalized{});
  REQUIRE(glob.locations.size() == 2);
  const auto aut = AttractorSet::compute(p, Autarky{});
  REQUIRE(aut.locations.size() == 4);
}

TEST_CASE("globalized point classification") {
  const auto p = symmetric_params(0.7, 0.4);
  const auto attractors = AttractorSet::compute(p, LinearGlobalized{});
  CHECK(classify_point({0.1, 0.1}, p, LinearGlobalized{}, {}, attractors) ==
        BasinLabel::ToOrigin);
  CHECK(classify_point({0.9, 0.9}, p, LinearGlobalized{}, {}, attractors) ==
        BasinLabel::ToOne);
}

TEST_CASE("autarky grid agrees with the oracle") {
  const auto p = symmetric_params(0.7, 0.4);
  const int n = 21;
  const auto grid = classify_grid(p, Autarky{}, n);
  int mismatches = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const PhasePoint c{(i + 0.5) / n, (j + 0.5) / n};
      if (std::abs(c.x_a - 0.4) < 1e-3 || std::abs(c.x_b - 0.4) < 1e-3)
        continue;
      if (grid.at(i, j) != autarky_oracle(c, 0.4)) ++mismatches;
    }
  }
  CHECK(mismatches == 0);
}

TEST_CASE("globalized grid has no partial-endemic labels and is transpose "
          "symmetric") {
  const auto p = symmetric_params(0.7, 0.4);
  const int n = 21;
  const auto grid = classify_grid(p, LinearGlobalized{}, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const BasinLabel l = grid.at(i, j);
      CHECK(l != BasinLabel::ToZeroOne);
      CHECK(l != BasinLabel::ToOneZero);
      CHECK(l == grid.at(j, i));
    }
  }
}

TEST_CASE("area report and the dark ratio") {
  const auto p = symmetric_params(0.7, 0.4);
  const auto grid = classify_grid(p, LinearGlobalized{}, 41);
  const auto report = area_report(grid, p);
  CHECK(report.unresolved_fraction == 0.0);
  CHECK(report.area_to_origin + report.area_to_one ==
        Catch::Approx(1.0).margin(1e-12));
  CHECK(report.dark_ratio >= 0.0);
  CHECK(report.dark_ratio <= 1.0);

  // the dark ratio is the same when measured in either rectangle alone
  const int n = grid.resolution;
  const double q = 0.4;
  auto ratio_in = [&](bool sub) {
    std::size_t cells = 0, one = 0;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const double x = (i + 0.5) / n, y = (j + 0.5) / n;
        const bool in = sub ? (x >= q && y <= q) : (x <= q && y >= q);
        if (!in) continue;
        ++cells;
        if (grid.at(i, j) == BasinLabel::ToOne) ++one;
      }
    }
    return double(one) / double(cells);
  };
  CHECK(ratio_in(true) == ratio_in(false));
}

TEST_CASE("monte carlo agrees with the grid and is seed deterministic") {
  const auto p = symmetric_params(0.7, 0.4);
  const auto grid_report = area_report(classify_grid(p, LinearGlobalized{}, 41), p);
  const auto mc1 = monte_carlo_area(p, LinearGlobalized{}, 4000, 42);
  const auto mc2 = monte_carlo_area(p, LinearGlobalized{}, 4000, 42);
  CHECK(mc1.area_to_origin == mc2.area_to_origin);
  CHECK(mc1.dark_ratio == mc2.dark_ratio);
  CHECK(mc1.area_to_origin ==
        Catch::Approx(grid_report.area_to_origin).margin(0.03));
}

TEST_CASE("grid CSV uses integer label codes") {
  BasinGrid grid;
  grid.resolution = 2;
  grid.labels = {BasinLabel::ToOrigin, BasinLabel::ToOne,
                 BasinLabel::ToZeroOne, BasinLabel::Unresolved};
  std::ostringstream os;
  write_grid_csv(os, grid);
  CHECK(os.str() == "0,1\n2,9\n");
}
