#pragma once

#include <limits>
#include <vector>

#include "rum/model.hpp"

// Deterministic linear programming: primal simplex with Bland's rule, in
// plain double or exact rational (GMP) arithmetic.  This is the single
// numerical kernel behind patch enumeration, extremization and all bound
// computations.

namespace rum::lp {

enum class Sense { Min, Max };
enum class Arithmetic { Float, ExactRational };
enum class Status { Optimal, Infeasible, Unbounded };

struct Ineq {
  enum class Dir { Le, Ge };
  Vec a;
  double b = 0.0;
  Dir dir = Dir::Le;
};

struct VarBounds {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
};

struct LinearProgram {
  int num_vars = 0;
  Vec objective;  // empty = all-zero (pure feasibility)
  Sense sense = Sense::Min;
  std::vector<std::pair<Vec, double>> eq;  // a . v = b
  std::vector<Ineq> ineq;
  std::vector<VarBounds> var_bounds;  // empty = default (0, +inf) for all
};

struct Outcome {
  Status status = Status::Infeasible;
  double value = 0.0;  // set when Optimal
  Vec solution;        // set when Optimal
};

struct SolveConfig {
  double tolerance = 1e-9;
  Arithmetic arithmetic = Arithmetic::Float;
};

/// Solve the program.  Pivot selection follows Bland's least-index rule, so
/// results are deterministic.  Throws InvalidInput on dimension mismatches
/// or non-finite coefficients.
Outcome solve(const LinearProgram& lp, const SolveConfig& config = {});

struct SlackResult {
  bool feasible_with_interior = false;
  Vec witness;  // point on the weak system when one exists
  double slack = 0.0;
};

/// Decide whether {eqs hold, strict_ineqs hold strictly, weak_ineqs hold,
/// bounds hold} has a solution, by maximizing a margin variable eps in
/// [0, 1]: each strict a.v < b is rewritten as a.v <= b - eps.  The system
/// has interior iff the optimal eps exceeds the solver tolerance.
SlackResult max_slack_feasible(int num_vars,
                               const std::vector<std::pair<Vec, double>>& eqs,
                               const std::vector<Ineq>& strict_ineqs,
                               const std::vector<Ineq>& weak_ineqs,
                               const std::vector<VarBounds>& var_bounds,
                               const SolveConfig& config = {});

struct FaceResult {
  Outcome outcome;
  bool attained = false;  // strict system meets the optimal face
  Vec face_witness;
  double face_slack = 0.0;
};

/// Optimize lp (all inequalities treated weakly), then test whether the
/// optimal face {objective = value} contains a point satisfying the flagged
/// inequalities strictly.  The face equality uses the exact internal optimum,
/// so the test stays meaningful in ExactRational mode.
FaceResult extremize_face(const LinearProgram& lp,
                          const std::vector<char>& strict_ineq,
                          const SolveConfig& config = {});

}  // namespace rum::lp
