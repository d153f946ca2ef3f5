#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Core vocabulary for stochastic demand on linear budgets: budget systems,
// the patch partition of the budget arrangement, probability vectors over
// patches, and the binary matrix of rational demand types.

namespace rum {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b);

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class NotOnAnyBudget : public Error {
 public:
  using Error::Error;
};

class ColumnLimitExceeded : public Error {
 public:
  using Error::Error;
};

class InfeasibleObservables : public Error {
 public:
  using Error::Error;
};

class SizeCapExceeded : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Signs and sign vectors

/// Position of a point relative to one budget plane: sg(p'y - 1).
/// The underlying order Below < On < Above fixes all canonical orderings.
enum class Sign : std::uint8_t { Below = 0, On = 1, Above = 2 };

char to_char(Sign s);
Sign sign_from_char(char c);

/// Classify a margin p'y - 1 at tolerance tol.
Sign sign_of(double margin, double tol);

/// Per-plane classification shared by all points of a patch.  Entries follow
/// the system's arrangement order (counterfactual first when present).
struct SignVector {
  std::vector<Sign> signs;

  std::size_t size() const { return signs.size(); }
  Sign operator[](std::size_t i) const { return signs[i]; }

  friend bool operator==(const SignVector&, const SignVector&) = default;
  friend auto operator<=>(const SignVector&, const SignVector&) = default;

  std::string str() const;
  static SignVector parse(std::string_view text);  // throws InvalidInput

  bool has_on() const;
};

// ---------------------------------------------------------------------------
// Budgets

/// One budget plane {y >= 0 : p'y = 1}; expenditure is normalized to 1.
struct Budget {
  std::string id;
  Vec p;  // strictly positive prices
};

/// Ordered collection of observed budgets plus an optional counterfactual
/// one.  The arrangement order puts the counterfactual first (index 0)
/// followed by the observed budgets (indices 1..J).
struct BudgetSystem {
  std::vector<Budget> budgets;
  std::optional<Budget> counterfactual;
  double tolerance = 1e-9;
  bool keep_null_patches = false;

  int dimension() const;
  int observed_count() const { return static_cast<int>(budgets.size()); }
  bool has_counterfactual() const { return counterfactual.has_value(); }
  int plane_count() const;

  /// Budget at arrangement position a.
  const Budget& plane(int a) const;

  BudgetSystem without_counterfactual() const;

  /// Throws InvalidInput on dimension mismatches, nonpositive prices,
  /// duplicate ids or a nonpositive tolerance.
  void validate() const;
};

// ---------------------------------------------------------------------------
// Patches

struct LinearConstraint {
  enum class Relation { Eq, Le, Ge };
  Vec a;
  double b = 0.0;
  Relation rel = Relation::Eq;
};

/// One cell of the budget arrangement, listed under `home`.  The closure
/// constraints are the plane rows in arrangement order followed by the
/// coordinate bounds y_k >= 0.
struct Patch {
  int home = 0;
  SignVector sign;  // sign[home] == On
  int dimension = 0;
  std::vector<LinearConstraint> closure;
};

/// All patches of all budgets, budget-major, each block in canonical order
/// (lexicographic by sign vector with Below < On < Above).
struct VectorRepresentation {
  std::vector<Patch> entries;
  std::vector<int> offsets;  // offsets[a] = first row of block a

  int total() const { return static_cast<int>(entries.size()); }
  int blocks() const { return static_cast<int>(offsets.size()); }
  int block_size(int a) const;
  int global_index(int a, int local) const { return offsets[a] + local; }
  std::pair<int, int> locate(int global) const;  // (block, local)

  const Patch& patch(int a, int local) const { return entries[global_index(a, local)]; }

  /// Local index of the patch with this sign in block a, or -1.
  int find_in_block(int a, const SignVector& sign) const;
};

// ---------------------------------------------------------------------------
// Probabilities and rational types

/// Patch choice probabilities aligned with a VectorRepresentation.
struct DemandProbabilities {
  enum class Source { Exact, EmpiricalCounts };

  Vec values;
  Source source = Source::Exact;
  std::vector<long> counts;  // per budget, EmpiricalCounts only
};

/// Binary matrix whose columns are rational demand types: each column
/// selects exactly one patch per budget block.  Columns are stored as the
/// selected local patch index per block, in canonical (lexicographic) order.
struct RationalMatrix {
  VectorRepresentation rows;
  std::vector<std::vector<int>> columns;

  int H() const { return static_cast<int>(columns.size()); }
  bool entry(int global_row, int h) const;

  /// A nu; result aligned with rows.
  Vec apply(const Vec& nu) const;
};

/// The augmented system over (B_0, B_1, ..., B_J): matrix A*, the row split
/// into counterfactual rows (block 0) and observed rows (blocks 1..J), and
/// the map from each original observed patch to its refined children.
struct AugmentedSystem {
  BudgetSystem system;    // counterfactual present
  RationalMatrix matrix;  // A*
  std::vector<int> rows_0;
  std::vector<int> rows_1;
  VectorRepresentation observed_rep;
  std::vector<std::vector<int>> refinement_map;  // observed global -> augmented rows

  const VectorRepresentation& rep() const { return matrix.rows; }
  int counterfactual_patch_count() const { return static_cast<int>(rows_0.size()); }
};

// ---------------------------------------------------------------------------
// Operations

/// Canonicalize a patch list into a vector representation.  Throws
/// InvalidInput on duplicate sign vectors within a block, a budget with no
/// patches, or dimension mismatches (all signal upstream failure).
VectorRepresentation build_vector_representation(std::vector<Patch> patches,
                                                 const BudgetSystem& system);

/// Check alignment, entry range and per-block sums; returns a copy whose
/// blocks are normalized to sum exactly to one.  Errors name the offending
/// block.
DemandProbabilities validate_probabilities(const DemandProbabilities& pi,
                                           const VectorRepresentation& rep,
                                           double tolerance);

}  // namespace rum
