#pragma once

#include <optional>
#include <vector>

#include "rum/geometry.hpp"
#include "rum/model.hpp"

// Enumeration of rational demand types (columns of A and A*) via
// revealed-preference acyclicity, and construction of the augmented system.

namespace rum::rational {

/// One candidate type: for each budget block, the local index of the chosen
/// patch.  Partial during search.
struct PatchAssignment {
  std::vector<std::optional<int>> chosen;
};

/// Revealed-preference relations induced by a (partial) assignment.  An edge
/// j -> k means the patch chosen on budget k is affordable at budget j:
/// weakly when its sign there is On, strictly when Below.  Edges depend only
/// on sign vectors.
struct PreferenceGraph {
  int nodes = 0;
  std::vector<std::pair<int, int>> weak_edges;
  std::vector<std::pair<int, int>> strict_edges;

  static PreferenceGraph from_assignment(const PatchAssignment& assignment,
                                         const VectorRepresentation& rep);

  /// True when some strongly connected component contains a strict edge.
  bool has_fatal_cycle() const;
};

/// GARP at patch level: true iff no strongly connected component of the
/// preference graph contains a strict edge (weak cycles express indifference
/// and are allowed).  Throws InvalidInput on an incomplete assignment.
bool is_rational(const PatchAssignment& assignment, const VectorRepresentation& rep);

/// Depth-first enumeration over budgets in order, one patch per block,
/// pruning any prefix whose induced preference graph is already fatal.
/// Columns come out in canonical (lexicographic) order.  Throws
/// ColumnLimitExceeded when more than column_cap types would be emitted.
RationalMatrix enumerate_types(const VectorRepresentation& rep,
                               long column_cap = 1'000'000);

/// Run patch enumeration and type enumeration on the augmented arrangement
/// (B_0, B_1, ..., B_J), split rows into the counterfactual block and the
/// observed blocks, and match every original observed patch to the refined
/// patches it splits into.
AugmentedSystem build_augmented(const BudgetSystem& system,
                                const lp::SolveConfig& config = {},
                                long column_cap = 1'000'000);

}  // namespace rum::rational
