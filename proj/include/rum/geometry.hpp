#pragma once

#include <vector>

#include "rum/lp.hpp"
#include "rum/model.hpp"

// Construction of the patch partition of a budget arrangement and polytope
// queries on patches: point classification, linear extremization over patch
// closures, and patch/hyperplane intersection.

namespace rum::geometry {

struct ExtremizationResult {
  double inf_value = 0.0;
  double sup_value = 0.0;
  bool inf_attained = false;  // attained on the patch itself, not just its closure
  bool sup_attained = false;
  Vec inf_witness;
  Vec sup_witness;
};

struct PointClassification {
  SignVector sign;
  std::vector<int> home_budgets;  // arrangement indices of all On entries
};

/// Diagnostics from patch enumeration; used by the CLI to suggest exact
/// arithmetic when feasibility decisions were close calls.
struct EnumerationStats {
  double min_accept_slack = std::numeric_limits<double>::infinity();
  int near_threshold_decisions = 0;
};

/// Enumerate all patches of the arrangement (counterfactual plane included
/// when present).  For each budget, every sign pattern with On at the home
/// position whose region is nonempty yields a patch; patterns whose equality
/// set has rank above one are lower-dimensional and kept only when
/// keep_null_patches is set.  Output is in canonical order.
std::vector<Patch> enumerate_patches(const BudgetSystem& system,
                                     const lp::SolveConfig& config = {},
                                     EnumerationStats* stats = nullptr);

/// Sign vector of y >= 0 against every plane at the system tolerance.
/// Throws NotOnAnyBudget when no entry is On.
PointClassification classify_point(const Vec& y, const BudgetSystem& system);

/// inf/sup of z.y over the patch closure, with attainment on the patch
/// itself decided by restricting to the optimal face.
ExtremizationResult extremize_linear(const Vec& z, const Patch& patch,
                                     const BudgetSystem& system,
                                     const lp::SolveConfig& config = {});

/// Whether the patch itself (not merely its closure) meets {z.y = t}.
bool hyperplane_meets_patch(const Patch& patch, const Vec& z, double t,
                            const BudgetSystem& system,
                            const lp::SolveConfig& config = {});

/// Vertices of the patch closure by brute-force basis enumeration,
/// deduplicated and sorted.  Intended for presentation at small K.
std::vector<Vec> closure_vertices(const Patch& patch, const BudgetSystem& system);

/// Constraint system of a patch split into equalities and strict
/// inequalities (the y >= 0 bounds stay implicit).  Shared by the
/// enumeration, extremization and the tests.
struct PatchConstraints {
  std::vector<std::pair<Vec, double>> eqs;
  std::vector<lp::Ineq> stricts;
};
PatchConstraints patch_constraints(const Patch& patch, const BudgetSystem& system);

}  // namespace rum::geometry
