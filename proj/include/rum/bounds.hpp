#pragma once

#include <vector>

#include "rum/lp.hpp"
#include "rum/model.hpp"

// Rationalizability testing and sharp bounds on counterfactual demand:
// event probabilities, expectations of bounded functionals, and pointwise
// c.d.f. envelopes, all as linear programs over the simplex of types.

namespace rum::bounds {

enum class Attainability { Unknown, Yes };
enum class BoundStatus { Ok, InfeasibleObservables };

struct BoundResult {
  BoundStatus status = BoundStatus::Ok;
  double lower = 0.0;
  double upper = 0.0;
  Attainability lower_attainable = Attainability::Unknown;
  Attainability upper_attainable = Attainability::Unknown;
  Vec witness_lower;  // nu achieving the lower value
  Vec witness_upper;
  double l1_residual = 0.0;  // diagnostic, set when InfeasibleObservables
};

struct RationalizabilityResult {
  bool rationalizable = false;
  Vec nu;             // witness when rationalizable, closest point otherwise
  double l1_residual = 0.0;
};

struct CdfEnvelope {
  Vec grid;
  Vec lower;
  Vec upper;
};

/// An event on the counterfactual budget, resolved to patch index sets
/// within block 0: inner = patches contained in the event, outer = patches
/// meeting it.  For a union of patches the two coincide.
struct Event {
  std::vector<int> inner;
  std::vector<int> outer;

  static Event patch_union(std::vector<int> ids);
};

/// pi is rationalizable iff {A nu = pi, nu >= 0} is feasible (the simplex
/// constraint is implied by the block sums).  On failure the l1 distance
/// min ||A nu - pi||_1 over the simplex is reported as a diagnostic.
RationalizabilityResult test_rationalizable(const RationalMatrix& A,
                                            const DemandProbabilities& pi,
                                            const lp::SolveConfig& config = {});

/// Rationalizability of the observed blocks alone: feasibility of
/// {A*_1 nu = pi1, nu in the simplex}, with the same l1 diagnostic.
RationalizabilityResult test_observables(const AugmentedSystem& aug,
                                         const DemandProbabilities& pi1,
                                         const lp::SolveConfig& config = {});

/// Whether a candidate counterfactual vector pi0 over block 0 is consistent
/// with the observed pi1: feasibility of A* nu = (pi0; pi1) over the simplex.
/// Throws InfeasibleObservables when pi1 alone admits no nu.
bool feasible_pi0(const AugmentedSystem& aug, const DemandProbabilities& pi1,
                  const Vec& pi0, const lp::SolveConfig& config = {});

/// Sharp bounds on Pr(y(p0) in event).
BoundResult counterfactual_event_bounds(const AugmentedSystem& aug,
                                        const DemandProbabilities& pi1,
                                        const Event& event,
                                        const lp::SolveConfig& config = {});

/// Sharp bounds on E g(y(p0)) from caller-supplied per-patch inf/sup of g.
/// Optional flags say whether each patch extremum is attained on the patch;
/// attainability of the bound is reported only when every patch the optimal
/// weights touch has an attained extremum.
BoundResult counterfactual_functional_bounds(const AugmentedSystem& aug,
                                             const DemandProbabilities& pi1,
                                             const Vec& g_lo, const Vec& g_hi,
                                             const lp::SolveConfig& config = {},
                                             const std::vector<char>& lo_attained = {},
                                             const std::vector<char>& hi_attained = {});

/// Sharp bounds on E z'y(p0): per-patch extremization followed by the
/// functional bounds.
BoundResult counterfactual_mean_bounds(const AugmentedSystem& aug,
                                       const DemandProbabilities& pi1,
                                       const Vec& z,
                                       const lp::SolveConfig& config = {});

/// Pointwise sharp bounds on Pr(z'y(p0) <= t) along a strictly increasing
/// grid.  Pointwise in t: the envelopes need not be attainable jointly.
CdfEnvelope counterfactual_cdf_bounds(const AugmentedSystem& aug,
                                      const DemandProbabilities& pi1,
                                      const Vec& z, const Vec& grid,
                                      const lp::SolveConfig& config = {});

/// Per-t coefficient vectors of the c.d.f. bounds over block 0: lower from
/// sup z'y <= t, upper from patch-meets-lower-halfspace with the boundary
/// case decided by patch/hyperplane intersection.
std::pair<Vec, Vec> cdf_coefficients(const AugmentedSystem& aug, const Vec& z,
                                     double t, const lp::SolveConfig& config = {});

/// Certify that some feasible demand distribution attains E g = value:
/// feasibility of {g_lo . (A0 nu) <= value <= g_hi . (A0 nu)} over the
/// constrained simplex (an equality when g_lo == g_hi).
bool value_attainable(const AugmentedSystem& aug, const DemandProbabilities& pi1,
                      const Vec& g_lo, const Vec& g_hi, double value,
                      const lp::SolveConfig& config = {});

}  // namespace rum::bounds
