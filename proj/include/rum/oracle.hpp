#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rum/lp.hpp"
#include "rum/model.hpp"

// Independent brute-force references used to certify the main pipeline at
// desk scale.  These share only the model types with the optimized modules:
// rationality is decided by exhaustive cycle search, bound extrema by basic
// solution enumeration, and the patch partition by seeded sampling.

namespace rum::oracle {

/// Every patch combination, filtered by exhaustive search over all directed
/// cycles (no strongly-connected-component shortcut).  Throws SizeCapExceeded
/// when the combination count exceeds combo_cap.
RationalMatrix brute_force_types(const VectorRepresentation& rep,
                                 long combo_cap = 10'000'000);

/// All basic feasible solutions of {A nu = rhs on row_indices, sum nu = 1,
/// nu >= 0}, found by solving every independent column subset.  Throws
/// SizeCapExceeded when A has more than h_cap columns, InfeasibleObservables
/// when no feasible basic solution exists.
std::vector<Vec> enumerate_feasible_vertices(const RationalMatrix& A,
                                             const std::vector<int>& row_indices,
                                             const Vec& rhs,
                                             double tolerance = 1e-9,
                                             int h_cap = 20);

/// Extremum of objective . (A0 nu) over the vertices of the observable
/// polytope; the reference value for every bound computation.
double vertex_enumerate_bounds(const AugmentedSystem& aug,
                               const DemandProbabilities& pi1,
                               const Vec& objective_over_block0,
                               lp::Sense sense,
                               double tolerance = 1e-9,
                               int h_cap = 20);

struct CoverReport {
  struct BudgetCover {
    std::string budget_id;
    std::map<std::string, long> hits;       // sign string -> sample count
    std::vector<std::string> missing;       // full-dimensional patches never hit
    std::vector<std::string> extraneous;    // observed signs absent from the list
  };
  std::vector<BudgetCover> budgets;
  long samples_per_budget = 0;
  std::uint64_t seed = 0;

  bool clean() const;
};

/// Sample n points per budget plane (uniform over the budget simplex via
/// normalized exponential spacings, seeded), classify each by sign, and
/// compare against the enumerated patch list.  Points landing within ten
/// tolerances of a foreign plane are redrawn.
CoverReport sample_patch_cover(const BudgetSystem& system, long n, std::uint64_t seed);

}  // namespace rum::oracle
