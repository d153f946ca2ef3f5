#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "rum/bounds.hpp"
#include "rum/oracle.hpp"
#include "rum/rational.hpp"
#include "testutil.hpp"

using namespace rum;
using namespace rum::bounds;
using rumtest::two_budget_system;
using rumtest::worked_augmented_system;
using rumtest::worked_pi;
using rumtest::worked_pi1;

namespace {

RationalMatrix worked_matrix() {
  return rational::enumerate_types(rumtest::representation_of(two_budget_system()));
}

AugmentedSystem worked_aug() { return rational::build_augmented(worked_augmented_system()); }

AugmentedSystem counterfactual_only(Vec p0) {
  BudgetSystem s;
  s.counterfactual = Budget{"B0", std::move(p0)};
  return rational::build_augmented(s);
}

DemandProbabilities empty_pi1() { return {}; }

}  // namespace

TEST_CASE("worked rationalizability round trip") {
  const auto A = worked_matrix();
  const auto res = test_rationalizable(A, worked_pi());
  REQUIRE(res.rationalizable);
  REQUIRE(res.nu.size() == 3);
  CHECK(res.nu[0] == doctest::Approx(0.5));
  CHECK(res.nu[1] == doctest::Approx(0.3));
  CHECK(res.nu[2] == doctest::Approx(0.2));
  CHECK(res.l1_residual == 0.0);
}

TEST_CASE("worked rejection with positive residual") {
  const auto A = worked_matrix();
  DemandProbabilities pi;
  pi.values = {0.6, 0.4, 0.5, 0.5};  // would force a negative weight
  const auto res = test_rationalizable(A, pi);
  CHECK_FALSE(res.rationalizable);
  CHECK(res.l1_residual > 1e-6);
}

TEST_CASE("degenerate types are their own witnesses") {
  const auto A = worked_matrix();
  for (int h = 0; h < A.H(); ++h) {
    Vec unit(static_cast<std::size_t>(A.H()), 0.0);
    unit[static_cast<std::size_t>(h)] = 1.0;
    const auto res = test_rationalizable(A, rumtest::pi_from_nu(A, unit));
    REQUIRE(res.rationalizable);
    CHECK(res.nu[static_cast<std::size_t>(h)] == doctest::Approx(1.0));
  }
}

TEST_CASE("misaligned probabilities are rejected") {
  const auto A = worked_matrix();
  DemandProbabilities pi;
  pi.values = {1.0, 0.0};
  CHECK_THROWS_AS(test_rationalizable(A, pi), InvalidInput);
}

TEST_CASE("feasible_pi0: pushforward, contradiction and midpoint") {
  const auto aug = worked_aug();

  // Any A0 nu built from a nu feasible for the observed block is consistent.
  Vec nu(static_cast<std::size_t>(aug.matrix.H()), 1.0 / aug.matrix.H());
  const auto pi1 = rumtest::pi1_from_nu(aug, nu);
  Vec pi0(static_cast<std::size_t>(aug.counterfactual_patch_count()), 0.0);
  for (int h = 0; h < aug.matrix.H(); ++h)
    pi0[static_cast<std::size_t>(aug.matrix.columns[static_cast<std::size_t>(h)][0])] += nu[static_cast<std::size_t>(h)];
  CHECK(feasible_pi0(aug, pi1, pi0));

  // Mass above the sharp upper bound of the first patch is inconsistent.
  const auto wpi1 = worked_pi1();
  CHECK_FALSE(feasible_pi0(aug, wpi1, {0.3, 0.2, 0.5}));

  // Midpoints of the per-patch bound intervals assemble into a feasible pi0
  // on this instance.
  CHECK(feasible_pi0(aug, wpi1, {0.1, 0.15, 0.75}));
}

TEST_CASE("feasible_pi0 validates its inputs") {
  const auto aug = worked_aug();
  const auto pi1 = worked_pi1();
  CHECK_THROWS_AS(feasible_pi0(aug, pi1, {0.5, 0.5}), InvalidInput);
  CHECK_THROWS_AS(feasible_pi0(aug, pi1, {0.5, 0.4, 0.4}), InvalidInput);
  DemandProbabilities bad;
  bad.values = {1.0, 0.0, 0.0, 1.0, 0.0, 0.0};  // strict-cycle observables
  CHECK_THROWS_AS(feasible_pi0(aug, bad, {0.3, 0.3, 0.4}), InfeasibleObservables);
}

TEST_CASE("worked event bounds: middle patch identified as [0.5, 1]") {
  const auto aug = worked_aug();
  const auto pi1 = worked_pi1();
  const int middle = aug.rep().find_in_block(0, SignVector::parse("0++"));
  REQUIRE(middle >= 0);
  const auto res = counterfactual_event_bounds(aug, pi1, Event::patch_union({middle}));
  REQUIRE(res.status == BoundStatus::Ok);
  CHECK(res.lower == doctest::Approx(0.5));
  CHECK(res.upper == doctest::Approx(1.0));
  CHECK(res.lower_attainable == Attainability::Yes);
  CHECK(res.upper_attainable == Attainability::Yes);

  // Sharpness against the vertex oracle.
  Vec gamma(3, 0.0);
  gamma[static_cast<std::size_t>(middle)] = 1.0;
  CHECK(res.lower ==
        doctest::Approx(oracle::vertex_enumerate_bounds(aug, pi1, gamma, lp::Sense::Min)).epsilon(1e-9));
  CHECK(res.upper ==
        doctest::Approx(oracle::vertex_enumerate_bounds(aug, pi1, gamma, lp::Sense::Max)).epsilon(1e-9));
}

TEST_CASE("event over the whole counterfactual budget is pinned at one") {
  const auto aug = worked_aug();
  const auto res = counterfactual_event_bounds(aug, worked_pi1(), Event::patch_union({0, 1, 2}));
  REQUIRE(res.status == BoundStatus::Ok);
  CHECK(res.lower == doctest::Approx(1.0));
  CHECK(res.upper == doctest::Approx(1.0));
}

TEST_CASE("no observed budgets: proper events are vacuously [0, 1]") {
  const auto aug = counterfactual_only({1.0, 2.0});
  REQUIRE(aug.counterfactual_patch_count() == 1);
  Event proper;  // a strict subset of the single patch: empty inner, full outer
  proper.inner = {};
  proper.outer = {0};
  const auto res = counterfactual_event_bounds(aug, empty_pi1(), proper);
  REQUIRE(res.status == BoundStatus::Ok);
  CHECK(res.lower == doctest::Approx(0.0));
  CHECK(res.upper == doctest::Approx(1.0));
}

TEST_CASE("event validation") {
  const auto aug = worked_aug();
  Event bad;
  bad.inner = {5};
  bad.outer = {5};
  CHECK_THROWS_AS(counterfactual_event_bounds(aug, worked_pi1(), bad), InvalidInput);
  Event inverted;
  inverted.inner = {0};
  inverted.outer = {1};
  CHECK_THROWS_AS(counterfactual_event_bounds(aug, worked_pi1(), inverted), InvalidInput);
}

TEST_CASE("functional bounds: constants, indicators and means") {
  const auto aug = worked_aug();
  const auto pi1 = worked_pi1();

  const auto ones = counterfactual_functional_bounds(aug, pi1, {1, 1, 1}, {1, 1, 1});
  REQUIRE(ones.status == BoundStatus::Ok);
  CHECK(ones.lower == doctest::Approx(1.0));
  CHECK(ones.upper == doctest::Approx(1.0));

  const int middle = aug.rep().find_in_block(0, SignVector::parse("0++"));
  Vec ind(3, 0.0);
  ind[static_cast<std::size_t>(middle)] = 1.0;
  const auto via_g = counterfactual_functional_bounds(aug, pi1, ind, ind);
  const auto via_event = counterfactual_event_bounds(aug, pi1, Event::patch_union({middle}));
  CHECK(via_g.lower == doctest::Approx(via_event.lower).epsilon(1e-12));
  CHECK(via_g.upper == doctest::Approx(via_event.upper).epsilon(1e-12));

  const Vec z{1.0, 0.0};
  Vec g_lo(3), g_hi(3);
  for (int i = 0; i < 3; ++i) {
    const auto ext = geometry::extremize_linear(z, aug.rep().patch(0, i), aug.system);
    g_lo[static_cast<std::size_t>(i)] = ext.inf_value;
    g_hi[static_cast<std::size_t>(i)] = ext.sup_value;
  }
  const auto via_functional = counterfactual_functional_bounds(aug, pi1, g_lo, g_hi);
  const auto via_mean = counterfactual_mean_bounds(aug, pi1, z);
  CHECK(via_functional.lower == doctest::Approx(via_mean.lower).epsilon(1e-12));
  CHECK(via_functional.upper == doctest::Approx(via_mean.upper).epsilon(1e-12));

  CHECK_THROWS_AS(counterfactual_functional_bounds(aug, pi1, {1, 0, 0}, {0, 1, 1}), InvalidInput);
}

TEST_CASE("worked mean bounds for good one") {
  const auto aug = worked_aug();
  const auto pi1 = worked_pi1();
  const auto res = counterfactual_mean_bounds(aug, pi1, {1.0, 0.0});
  REQUIRE(res.status == BoundStatus::Ok);
  CHECK(res.lower == doctest::Approx(7.0 / 60.0));
  CHECK(res.upper == doctest::Approx(0.7));
  // Optimal weights sit on patches whose extremum is approached but not
  // attained, so the report stays conservative.
  CHECK(res.lower_attainable == Attainability::Unknown);
  CHECK(res.upper_attainable == Attainability::Unknown);

  // Oracle agreement with the same coefficient vectors.
  Vec g_lo(3), g_hi(3);
  for (int i = 0; i < 3; ++i) {
    const auto ext = geometry::extremize_linear({1.0, 0.0}, aug.rep().patch(0, i), aug.system);
    g_lo[static_cast<std::size_t>(i)] = ext.inf_value;
    g_hi[static_cast<std::size_t>(i)] = ext.sup_value;
  }
  CHECK(res.lower ==
        doctest::Approx(oracle::vertex_enumerate_bounds(aug, pi1, g_lo, lp::Sense::Min)).epsilon(1e-9));
  CHECK(res.upper ==
        doctest::Approx(oracle::vertex_enumerate_bounds(aug, pi1, g_hi, lp::Sense::Max)).epsilon(1e-9));
}

TEST_CASE("means with no observed budgets reduce to patch extrema") {
  const auto aug = counterfactual_only({1.0, 2.0});
  const auto res = counterfactual_mean_bounds(aug, empty_pi1(), {1.0, 0.0});
  REQUIRE(res.status == BoundStatus::Ok);
  CHECK(res.lower == doctest::Approx(0.0));
  CHECK(res.upper == doctest::Approx(1.0));
  CHECK(res.lower_attainable == Attainability::Yes);
  CHECK(res.upper_attainable == Attainability::Yes);
}

TEST_CASE("budget price as functional pins the mean at one") {
  const auto aug = worked_aug();
  const auto res = counterfactual_mean_bounds(aug, worked_pi1(), {1.2, 1.2});
  REQUIRE(res.status == BoundStatus::Ok);
  CHECK(res.lower == doctest::Approx(1.0));
  CHECK(res.upper == doctest::Approx(1.0));

  const auto aug0 = counterfactual_only({1.0, 2.0});
  const auto res0 = counterfactual_mean_bounds(aug0, empty_pi1(), {1.0, 2.0});
  CHECK(res0.lower == doctest::Approx(1.0));
  CHECK(res0.upper == doctest::Approx(1.0));
}

TEST_CASE("mean bounds stay within the coefficient range") {
  const auto aug = worked_aug();
  const auto pi1 = worked_pi1();
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec z{unif(rng), unif(rng)};
    const auto res = counterfactual_mean_bounds(aug, pi1, z);
    REQUIRE(res.status == BoundStatus::Ok);
    double min_lo = 1e300, max_hi = -1e300;
    for (int i = 0; i < 3; ++i) {
      const auto ext = geometry::extremize_linear(z, aug.rep().patch(0, i), aug.system);
      min_lo = std::min(min_lo, ext.inf_value);
      max_hi = std::max(max_hi, ext.sup_value);
    }
    CHECK(res.lower >= min_lo - 1e-9);
    CHECK(res.upper <= max_hi + 1e-9);
    CHECK(res.lower <= res.upper + 1e-9);
  }
}

TEST_CASE("cdf envelope on the worked example") {
  const auto aug = worked_aug();
  const auto pi1 = worked_pi1();
  const Vec z{1.0, 0.0};
  const Vec grid{-0.1, 0.1, 0.4, 0.65, 0.8, 0.9};
  const auto env = counterfactual_cdf_bounds(aug, pi1, z, grid);
  REQUIRE(env.grid.size() == grid.size());

  CHECK(env.lower.front() == doctest::Approx(0.0));
  CHECK(env.upper.front() == doctest::Approx(0.0));
  CHECK(env.lower.back() == doctest::Approx(1.0));
  CHECK(env.upper.back() == doctest::Approx(1.0));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(env.lower[i] >= 0.0);
    CHECK(env.upper[i] <= 1.0);
    CHECK(env.lower[i] <= env.upper[i] + 1e-12);
    if (i > 0) {
      CHECK(env.lower[i] >= env.lower[i - 1] - 1e-12);
      CHECK(env.upper[i] >= env.upper[i - 1] - 1e-12);
    }
  }

  // Midpoint t: oracle agreement with the same coefficient vectors.
  const double t = 0.4;
  const auto [g_lo, g_hi] = cdf_coefficients(aug, z, t);
  CHECK(g_lo == Vec{0.0, 1.0, 0.0});
  CHECK(g_hi == Vec{0.0, 1.0, 1.0});
  const auto env_t = counterfactual_cdf_bounds(aug, pi1, z, {t});
  CHECK(env_t.lower[0] ==
        doctest::Approx(oracle::vertex_enumerate_bounds(aug, pi1, g_lo, lp::Sense::Min)).epsilon(1e-9));
  CHECK(env_t.upper[0] ==
        doctest::Approx(oracle::vertex_enumerate_bounds(aug, pi1, g_hi, lp::Sense::Max)).epsilon(1e-9));
}

TEST_CASE("cdf boundary coefficient follows the supporting-hyperplane rule") {
  const auto aug = worked_aug();
  // At t = 2/3, {y1 = t} is the lower supporting hyperplane of patch (0,-,+)
  // but meets it only at the excluded crossing point: coefficient 0.  The
  // patch (0,+,+) has supremum 2/3 approached but never attained, so the
  // lower coefficient there is 1 (its closure supremum equals t).
  const auto [g_lo, g_hi] = cdf_coefficients(aug, {1.0, 0.0}, 2.0 / 3.0);
  CHECK(g_hi[0] == 0.0);  // (0,-,+): inf = 2/3 not attained
  CHECK(g_lo[2] == 1.0);  // (0,+,+): sup = 2/3
  CHECK(g_hi[2] == 1.0);  // inf 1/6 < t
}

TEST_CASE("cdf grid must increase strictly") {
  const auto aug = worked_aug();
  CHECK_THROWS_AS(counterfactual_cdf_bounds(aug, worked_pi1(), {1.0, 0.0}, {0.5, 0.5}),
                  InvalidInput);
}

TEST_CASE("infeasible observables short-circuit every bound") {
  const auto aug = worked_aug();
  DemandProbabilities bad;
  bad.values = {1.0, 0.0, 0.0, 1.0, 0.0, 0.0};

  const auto diag = test_observables(aug, bad);
  CHECK_FALSE(diag.rationalizable);
  CHECK(diag.l1_residual > 1e-6);

  const auto ev = counterfactual_event_bounds(aug, bad, Event::patch_union({0}));
  CHECK(ev.status == BoundStatus::InfeasibleObservables);
  CHECK(ev.l1_residual == doctest::Approx(diag.l1_residual).epsilon(1e-9));
  const auto mean = counterfactual_mean_bounds(aug, bad, {1.0, 0.0});
  CHECK(mean.status == BoundStatus::InfeasibleObservables);
  CHECK_THROWS_AS(counterfactual_cdf_bounds(aug, bad, {1.0, 0.0}, {0.5}), InfeasibleObservables);
}

TEST_CASE("mixture attainability: interior values are feasible") {
  const auto aug = worked_aug();
  const auto pi1 = worked_pi1();

  const int middle = aug.rep().find_in_block(0, SignVector::parse("0++"));
  Vec ind(3, 0.0);
  ind[static_cast<std::size_t>(middle)] = 1.0;
  const auto ev = counterfactual_event_bounds(aug, pi1, Event::patch_union({middle}));
  CHECK(value_attainable(aug, pi1, ind, ind, 0.5 * (ev.lower + ev.upper)));
  CHECK_FALSE(value_attainable(aug, pi1, ind, ind, ev.upper + 0.05));

  Vec g_lo(3), g_hi(3);
  for (int i = 0; i < 3; ++i) {
    const auto ext = geometry::extremize_linear({1.0, 0.0}, aug.rep().patch(0, i), aug.system);
    g_lo[static_cast<std::size_t>(i)] = ext.inf_value;
    g_hi[static_cast<std::size_t>(i)] = ext.sup_value;
  }
  const auto mean = counterfactual_mean_bounds(aug, pi1, {1.0, 0.0});
  CHECK(value_attainable(aug, pi1, g_lo, g_hi, 0.5 * (mean.lower + mean.upper)));
  CHECK_FALSE(value_attainable(aug, pi1, g_lo, g_hi, mean.upper + 0.05));
  CHECK_FALSE(value_attainable(aug, pi1, g_lo, g_hi, mean.lower - 0.05));
}

TEST_CASE("containment: an observed budget as counterfactual keeps the data feasible") {
  BudgetSystem s = two_budget_system();
  s.counterfactual = Budget{"B0", s.budgets[0].p};  // B0 coincides with b1
  const auto aug = rational::build_augmented(s);

  std::mt19937_64 rng(37);
  const Vec nu = rumtest::random_simplex(rng, aug.matrix.H());
  const auto pi1 = rumtest::pi1_from_nu(aug, nu);

  // Re-index budget 1's refined block as a candidate pi0.
  Vec pi0;
  for (int l = 0; l < aug.rep().block_size(1); ++l) {
    const int row = aug.rep().global_index(1, l) - aug.rep().block_size(0);
    pi0.push_back(pi1.values[static_cast<std::size_t>(row)]);
  }
  REQUIRE(pi0.size() == static_cast<std::size_t>(aug.counterfactual_patch_count()));
  CHECK(feasible_pi0(aug, pi1, pi0));
}

TEST_CASE("exact rational arithmetic reproduces the float bounds") {
  const lp::SolveConfig exact{1e-9, lp::Arithmetic::ExactRational};
  const auto aug = rational::build_augmented(worked_augmented_system(), exact);
  const auto pi1 = worked_pi1();

  const auto mean = counterfactual_mean_bounds(aug, pi1, {1.0, 0.0}, exact);
  REQUIRE(mean.status == BoundStatus::Ok);
  CHECK(mean.lower == doctest::Approx(7.0 / 60.0).epsilon(1e-12));
  CHECK(mean.upper == doctest::Approx(0.7).epsilon(1e-12));

  const int middle = aug.rep().find_in_block(0, SignVector::parse("0++"));
  const auto ev = counterfactual_event_bounds(aug, pi1, Event::patch_union({middle}), exact);
  CHECK(ev.lower == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(ev.upper == doctest::Approx(1.0).epsilon(1e-12));

  // Dyadic inputs are represented exactly, so the witness is exact.
  DemandProbabilities dyadic;
  dyadic.values = {0.5, 0.5, 0.25, 0.75};
  const auto accept = test_rationalizable(worked_matrix(), dyadic, exact);
  REQUIRE(accept.rationalizable);
  CHECK(accept.nu == Vec{0.5, 0.25, 0.25});

  // Decimal 0.3/0.7 round to doubles that miss the equality manifold by one
  // ulp; exact mode reports that faithfully, with a residual at noise level.
  const auto strict = test_rationalizable(worked_matrix(), worked_pi(), exact);
  CHECK_FALSE(strict.rationalizable);
  CHECK(strict.l1_residual < 1e-12);
}

TEST_CASE("information monotonicity on the worked example") {
  const auto full = worked_aug();
  const auto pi1 = worked_pi1();
  const Vec z{1.0, 0.0};
  const auto full_mean = counterfactual_mean_bounds(full, pi1, z);

  for (int drop = 0; drop < 2; ++drop) {
    const auto reduced = rumtest::drop_budget(full, pi1, drop);
    const auto red_mean = counterfactual_mean_bounds(reduced.aug, reduced.pi1, z);
    REQUIRE(red_mean.status == BoundStatus::Ok);
    CHECK(red_mean.lower <= full_mean.lower + 1e-9);
    CHECK(red_mean.upper >= full_mean.upper - 1e-9);
  }
}
