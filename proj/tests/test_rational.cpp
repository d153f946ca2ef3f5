#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "rum/oracle.hpp"
#include "rum/rational.hpp"
#include "testutil.hpp"

using namespace rum;
using namespace rum::rational;
using rumtest::two_budget_system;
using rumtest::worked_augmented_system;

namespace {

PatchAssignment assign(std::vector<int> sel) {
  PatchAssignment a;
  for (int v : sel) a.chosen.push_back(v);
  return a;
}

std::set<std::vector<int>> column_set(const RationalMatrix& m) {
  return {m.columns.begin(), m.columns.end()};
}

}  // namespace

TEST_CASE("strict two-cycles violate rationality, one-way relations do not") {
  const auto rep = rumtest::representation_of(two_budget_system());
  // (0,-) & (-,0): each choice strictly affordable at the other budget.
  CHECK_FALSE(is_rational(assign({0, 0}), rep));
  CHECK(is_rational(assign({0, 1}), rep));
  CHECK(is_rational(assign({1, 0}), rep));
  CHECK(is_rational(assign({1, 1}), rep));
}

TEST_CASE("single budget is always rational") {
  BudgetSystem s;
  s.budgets = {{"b1", {1.0, 1.0}}};
  const auto rep = rumtest::representation_of(s);
  CHECK(is_rational(assign({0}), rep));
}

TEST_CASE("incomplete assignments are rejected") {
  const auto rep = rumtest::representation_of(two_budget_system());
  PatchAssignment partial;
  partial.chosen = {std::optional<int>(0), std::nullopt};
  CHECK_THROWS_AS(is_rational(partial, rep), InvalidInput);
}

TEST_CASE("preference graph edges come from signs alone") {
  const auto rep = rumtest::representation_of(two_budget_system());
  const auto g = PreferenceGraph::from_assignment(assign({0, 0}), rep);
  REQUIRE(g.strict_edges.size() == 2);
  CHECK(g.weak_edges.empty());
  CHECK(g.has_fatal_cycle());

  const auto g2 = PreferenceGraph::from_assignment(assign({1, 1}), rep);
  CHECK(g2.strict_edges.empty());
  CHECK_FALSE(g2.has_fatal_cycle());
}

TEST_CASE("weak cycles are allowed: identical budgets express indifference") {
  BudgetSystem s;
  s.budgets = {{"b1", {1.0, 2.0}}, {"b2", {1.0, 2.0}}};
  const auto rep = rumtest::representation_of(s);
  CHECK(is_rational(assign({0, 0}), rep));
  const auto mat = enumerate_types(rep);
  CHECK(mat.H() == 1);
}

TEST_CASE("worked example: three rational types in canonical order") {
  const auto rep = rumtest::representation_of(two_budget_system());
  const auto mat = enumerate_types(rep);
  REQUIRE(mat.H() == 3);
  CHECK(mat.columns[0] == std::vector<int>{0, 1});
  CHECK(mat.columns[1] == std::vector<int>{1, 0});
  CHECK(mat.columns[2] == std::vector<int>{1, 1});
}

TEST_CASE("single budget yields the unit matrix") {
  BudgetSystem s;
  s.budgets = {{"b1", {1.0, 1.0}}};
  const auto mat = enumerate_types(rumtest::representation_of(s));
  REQUIRE(mat.H() == 1);
  CHECK(mat.columns[0] == std::vector<int>{0});
}

TEST_CASE("column cap raises ColumnLimitExceeded") {
  const auto rep = rumtest::representation_of(two_budget_system());
  CHECK_THROWS_AS(enumerate_types(rep, 2), ColumnLimitExceeded);
}

TEST_CASE("augmented worked example matches the brute-force oracle") {
  const auto aug = build_augmented(worked_augmented_system());
  CHECK(aug.matrix.H() == 14);
  const auto oracle_cols = oracle::brute_force_types(aug.rep());
  CHECK(column_set(aug.matrix) == column_set(oracle_cols));
}

TEST_CASE("every emitted column selects one patch per block and is rational") {
  const auto aug = build_augmented(worked_augmented_system());
  for (const auto& sel : aug.matrix.columns) {
    REQUIRE(sel.size() == static_cast<std::size_t>(aug.rep().blocks()));
    PatchAssignment a;
    for (int v : sel) a.chosen.push_back(v);
    CHECK(is_rational(a, aug.rep()));
  }
}

TEST_CASE("augmented row split and refinement of the worked example") {
  const auto aug = build_augmented(worked_augmented_system());
  CHECK(aug.rows_0 == std::vector<int>{0, 1, 2});
  CHECK(aug.rows_1 == std::vector<int>{3, 4, 5, 6, 7, 8});

  // Budget 1's original (0,-) stays whole; (0,+) splits into two children.
  REQUIRE(aug.observed_rep.total() == 4);
  CHECK(aug.refinement_map[0].size() == 1);
  CHECK(aug.refinement_map[1].size() == 2);
  CHECK(aug.refinement_map[2].size() == 1);
  CHECK(aug.refinement_map[3].size() == 2);
  CHECK(aug.rep().entries[static_cast<std::size_t>(aug.refinement_map[0][0])].sign.str() == "-0-");
}

TEST_CASE("disjoint counterfactual leaves observed patches unchanged") {
  BudgetSystem s = two_budget_system();
  s.counterfactual = Budget{"B0", {4.0, 4.0}};  // strictly inside both budgets
  const auto aug = build_augmented(s);
  REQUIRE(aug.observed_rep.total() == 4);
  for (const auto& children : aug.refinement_map) CHECK(children.size() == 1);
  for (int a = 1; a < aug.rep().blocks(); ++a)
    CHECK(aug.rep().block_size(a) == aug.observed_rep.block_size(a - 1));
}

TEST_CASE("refined children cover their original patch") {
  const auto aug = build_augmented(worked_augmented_system());
  const BudgetSystem observed = aug.system.without_counterfactual();
  std::mt19937_64 rng(23);
  for (int g = 0; g < aug.observed_rep.total(); ++g) {
    const auto [a_obs, local] = aug.observed_rep.locate(g);
    for (int s = 0; s < 300; ++s) {
      Vec x = rumtest::random_simplex(rng, observed.dimension());
      Vec y(x.size());
      for (std::size_t i = 0; i < x.size(); ++i)
        y[i] = x[i] / observed.plane(a_obs).p[i];
      const auto cls = geometry::classify_point(y, observed);
      if (cls.sign != aug.observed_rep.patch(a_obs, local).sign) continue;
      // The point must classify into exactly one refined child.
      const auto aug_cls = geometry::classify_point(y, aug.system);
      if (aug_cls.home_budgets.size() > 1) continue;
      int hits = 0;
      for (int child : aug.refinement_map[static_cast<std::size_t>(g)])
        if (aug.rep().entries[static_cast<std::size_t>(child)].sign == aug_cls.sign) ++hits;
      CHECK(hits == 1);
    }
  }
}

TEST_CASE("projection: augmented columns coarsen onto the observed matrix") {
  const auto aug = build_augmented(worked_augmented_system());
  const auto observed_mat = enumerate_types(aug.observed_rep);

  // Map each refined observed patch to its original coarse local index.
  std::set<std::vector<int>> projected;
  for (const auto& sel : aug.matrix.columns) {
    std::vector<int> coarse;
    for (int a = 1; a < aug.rep().blocks(); ++a) {
      const int fine_global = aug.rep().global_index(a, sel[static_cast<std::size_t>(a)]);
      int coarse_local = -1;
      for (int g = 0; g < aug.observed_rep.total(); ++g) {
        const auto& children = aug.refinement_map[static_cast<std::size_t>(g)];
        if (std::find(children.begin(), children.end(), fine_global) != children.end()) {
          coarse_local = aug.observed_rep.locate(g).second;
          break;
        }
      }
      REQUIRE(coarse_local >= 0);
      coarse.push_back(coarse_local);
    }
    projected.insert(coarse);
    PatchAssignment a;
    for (int v : coarse) a.chosen.push_back(v);
    CHECK(is_rational(a, aug.observed_rep));
  }
  CHECK(projected == column_set(observed_mat));
}

TEST_CASE("pruned prefixes have no rational completions") {
  const auto sys = worked_augmented_system();
  const auto rep = rumtest::representation_of(sys);
  const int blocks = rep.blocks();
  // For every partial assignment over a prefix of blocks, fatal prefix
  // implies every completion fails the oracle's exhaustive check.
  std::function<void(std::vector<int>&)> walk = [&](std::vector<int>& sel) {
    const int depth = static_cast<int>(sel.size());
    if (depth == blocks) return;
    for (int l = 0; l < rep.block_size(depth); ++l) {
      sel.push_back(l);
      PatchAssignment partial;
      for (int v : sel) partial.chosen.push_back(v);
      for (int rest = depth + 1; rest < blocks; ++rest) partial.chosen.push_back(std::nullopt);
      const auto g = PreferenceGraph::from_assignment(partial, rep);
      if (g.has_fatal_cycle()) {
        // Exhaustive completions must all be irrational.
        std::vector<int> full(sel);
        full.resize(static_cast<std::size_t>(blocks), 0);
        std::function<bool(int)> any_rational = [&](int a) -> bool {
          if (a == blocks) {
            PatchAssignment c;
            for (int v : full) c.chosen.push_back(v);
            return is_rational(c, rep);
          }
          for (int x = 0; x < rep.block_size(a); ++x) {
            full[static_cast<std::size_t>(a)] = x;
            if (any_rational(a + 1)) return true;
          }
          return false;
        };
        CHECK_FALSE(any_rational(depth + 1));
      } else {
        walk(sel);
      }
      sel.pop_back();
    }
  };
  std::vector<int> sel;
  walk(sel);
}

TEST_CASE("random systems agree with the brute-force oracle") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 12; ++trial) {
    rumtest::SystemSpec spec;
    spec.k = 2 + static_cast<int>(rng() % 2);
    spec.j = 2 + static_cast<int>(rng() % 3);
    const auto sys = rumtest::random_system(rng, spec);
    const auto rep = rumtest::representation_of(sys);
    const auto fast = enumerate_types(rep);
    const auto slow = oracle::brute_force_types(rep);
    CHECK(column_set(fast) == column_set(slow));
  }
}

TEST_CASE("build_augmented requires a counterfactual") {
  CHECK_THROWS_AS(build_augmented(two_budget_system()), InvalidInput);
}
