#include "rum/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "rum/geometry.hpp"

namespace rum::bounds {
namespace {

// Row of the type matrix as a coefficient vector over nu.
Vec selector_row(const RationalMatrix& A, int global_row) {
  Vec row(static_cast<std::size_t>(A.H()), 0.0);
  const auto [a, local] = A.rows.locate(global_row);
  for (int h = 0; h < A.H(); ++h)
    if (A.columns[static_cast<std::size_t>(h)][static_cast<std::size_t>(a)] == local)
      row[static_cast<std::size_t>(h)] = 1.0;
  return row;
}

// Objective gamma . (A0 nu): each column selects exactly one block-0 patch.
Vec block0_objective(const AugmentedSystem& aug, const Vec& gamma) {
  Vec obj(static_cast<std::size_t>(aug.matrix.H()), 0.0);
  for (int h = 0; h < aug.matrix.H(); ++h) {
    const int sel0 = aug.matrix.columns[static_cast<std::size_t>(h)][0];
    obj[static_cast<std::size_t>(h)] = gamma[static_cast<std::size_t>(sel0)];
  }
  return obj;
}

void check_pi1(const AugmentedSystem& aug, const DemandProbabilities& pi1, double tol) {
  if (pi1.values.size() != aug.rows_1.size())
    throw InvalidInput("pi1 length differs from the observed row count");
  const VectorRepresentation& rep = aug.rep();
  for (double v : pi1.values) {
    if (!std::isfinite(v) || v < -tol || v > 1.0 + tol)
      throw InvalidInput("pi1 entry outside [0, 1]");
  }
  std::size_t at = 0;
  for (int a = 1; a < rep.blocks(); ++a) {
    double sum = 0.0;
    for (int l = 0; l < rep.block_size(a); ++l) sum += pi1.values[at++];
    if (std::abs(sum - 1.0) > tol)
      throw InvalidInput("pi1 block for budget '" + aug.system.plane(a).id + "' does not sum to 1");
  }
}

// Constraints {A1 nu = pi1, sum nu = 1, nu >= 0}.
lp::LinearProgram observable_program(const AugmentedSystem& aug, const DemandProbabilities& pi1) {
  lp::LinearProgram prog;
  prog.num_vars = aug.matrix.H();
  for (std::size_t i = 0; i < aug.rows_1.size(); ++i)
    prog.eq.emplace_back(selector_row(aug.matrix, aug.rows_1[i]), pi1.values[i]);
  prog.eq.emplace_back(Vec(static_cast<std::size_t>(aug.matrix.H()), 1.0), 1.0);
  return prog;
}

struct Observables {
  bool feasible = false;
  Vec nu;
  double l1_residual = 0.0;
};

// Minimum-l1 diagnostic over the simplex when the equalities cannot hold.
double l1_residual_of(const RationalMatrix& A, const std::vector<int>& row_idx,
                      const Vec& rhs, const lp::SolveConfig& config, Vec* closest) {
  const int H = A.H();
  const int R = static_cast<int>(row_idx.size());
  lp::LinearProgram prog;
  prog.num_vars = H + 2 * R;  // nu, r+, r-
  prog.objective.assign(static_cast<std::size_t>(prog.num_vars), 0.0);
  for (int r = 0; r < 2 * R; ++r) prog.objective[static_cast<std::size_t>(H + r)] = 1.0;
  for (int r = 0; r < R; ++r) {
    Vec row = selector_row(A, row_idx[static_cast<std::size_t>(r)]);
    row.resize(static_cast<std::size_t>(prog.num_vars), 0.0);
    row[static_cast<std::size_t>(H + r)] = -1.0;
    row[static_cast<std::size_t>(H + R + r)] = 1.0;
    prog.eq.emplace_back(std::move(row), rhs[static_cast<std::size_t>(r)]);
  }
  Vec ones(static_cast<std::size_t>(prog.num_vars), 0.0);
  for (int h = 0; h < H; ++h) ones[static_cast<std::size_t>(h)] = 1.0;
  prog.eq.emplace_back(std::move(ones), 1.0);
  const auto out = lp::solve(prog, config);
  if (out.status != lp::Status::Optimal)
    throw Error("l1 diagnostic program did not solve");
  if (closest != nullptr)
    closest->assign(out.solution.begin(), out.solution.begin() + H);
  return out.value;
}

Observables check_observables(const AugmentedSystem& aug, const DemandProbabilities& pi1,
                              const lp::SolveConfig& config) {
  Observables obs;
  const auto out = lp::solve(observable_program(aug, pi1), config);
  if (out.status == lp::Status::Optimal) {
    obs.feasible = true;
    obs.nu = out.solution;
    return obs;
  }
  obs.feasible = false;
  Vec rhs = pi1.values;
  obs.l1_residual = l1_residual_of(aug.matrix, aug.rows_1, rhs, config, &obs.nu);
  return obs;
}

BoundResult infeasible_result(const Observables& obs) {
  BoundResult r;
  r.status = BoundStatus::InfeasibleObservables;
  r.lower = std::numeric_limits<double>::quiet_NaN();
  r.upper = std::numeric_limits<double>::quiet_NaN();
  r.l1_residual = obs.l1_residual;
  return r;
}

// min/max of gamma . (A0 nu) over the observable polytope.
BoundResult two_sided(const AugmentedSystem& aug, const DemandProbabilities& pi1,
                      const Vec& gamma_lower, const Vec& gamma_upper,
                      const lp::SolveConfig& config) {
  check_pi1(aug, pi1, config.tolerance);
  const Observables obs = check_observables(aug, pi1, config);
  if (!obs.feasible) return infeasible_result(obs);

  BoundResult res;
  lp::LinearProgram prog = observable_program(aug, pi1);
  prog.objective = block0_objective(aug, gamma_lower);
  prog.sense = lp::Sense::Min;
  const auto lo = lp::solve(prog, config);
  if (lo.status != lp::Status::Optimal) throw Error("bound program did not solve");
  res.lower = lo.value;
  res.witness_lower = lo.solution;

  prog.objective = block0_objective(aug, gamma_upper);
  prog.sense = lp::Sense::Max;
  const auto hi = lp::solve(prog, config);
  if (hi.status != lp::Status::Optimal) throw Error("bound program did not solve");
  res.upper = hi.value;
  res.witness_upper = hi.solution;
  return res;
}

Vec pi0_of(const AugmentedSystem& aug, const Vec& nu) {
  Vec pi0(static_cast<std::size_t>(aug.counterfactual_patch_count()), 0.0);
  for (int h = 0; h < aug.matrix.H(); ++h)
    pi0[static_cast<std::size_t>(aug.matrix.columns[static_cast<std::size_t>(h)][0])] += nu[static_cast<std::size_t>(h)];
  return pi0;
}

Attainability attained_given(const AugmentedSystem& aug, const Vec& nu,
                             const std::vector<char>& flags, double tol) {
  if (flags.empty()) return Attainability::Unknown;
  const Vec pi0 = pi0_of(aug, nu);
  for (std::size_t i = 0; i < pi0.size(); ++i) {
    if (pi0[i] > tol && !flags[i]) return Attainability::Unknown;
  }
  return Attainability::Yes;
}

void check_event(const AugmentedSystem& aug, const Event& event) {
  const int i0 = aug.counterfactual_patch_count();
  auto check_ids = [&](const std::vector<int>& ids) {
    for (int i : ids)
      if (i < 0 || i >= i0) throw InvalidInput("event patch index outside block 0");
  };
  check_ids(event.inner);
  check_ids(event.outer);
  for (int i : event.inner) {
    if (std::find(event.outer.begin(), event.outer.end(), i) == event.outer.end())
      throw InvalidInput("event inner set not contained in the outer set");
  }
}

Vec indicator(int n, const std::vector<int>& ids) {
  Vec v(static_cast<std::size_t>(n), 0.0);
  for (int i : ids) v[static_cast<std::size_t>(i)] = 1.0;
  return v;
}

}  // namespace

Event Event::patch_union(std::vector<int> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  Event e;
  e.inner = ids;
  e.outer = std::move(ids);
  return e;
}

RationalizabilityResult test_rationalizable(const RationalMatrix& A,
                                            const DemandProbabilities& pi,
                                            const lp::SolveConfig& config) {
  const DemandProbabilities checked = validate_probabilities(pi, A.rows, config.tolerance);

  lp::LinearProgram prog;
  prog.num_vars = A.H();
  for (int g = 0; g < A.rows.total(); ++g)
    prog.eq.emplace_back(selector_row(A, g), checked.values[static_cast<std::size_t>(g)]);

  RationalizabilityResult res;
  const auto out = lp::solve(prog, config);
  if (out.status == lp::Status::Optimal) {
    res.rationalizable = true;
    res.nu = out.solution;
    res.l1_residual = 0.0;
    return res;
  }
  std::vector<int> all_rows(static_cast<std::size_t>(A.rows.total()));
  for (int g = 0; g < A.rows.total(); ++g) all_rows[static_cast<std::size_t>(g)] = g;
  res.rationalizable = false;
  res.l1_residual = l1_residual_of(A, all_rows, checked.values, config, &res.nu);
  return res;
}

RationalizabilityResult test_observables(const AugmentedSystem& aug,
                                         const DemandProbabilities& pi1,
                                         const lp::SolveConfig& config) {
  check_pi1(aug, pi1, config.tolerance);
  const Observables obs = check_observables(aug, pi1, config);
  RationalizabilityResult res;
  res.rationalizable = obs.feasible;
  res.nu = obs.nu;
  res.l1_residual = obs.l1_residual;
  return res;
}

bool feasible_pi0(const AugmentedSystem& aug, const DemandProbabilities& pi1,
                  const Vec& pi0, const lp::SolveConfig& config) {
  check_pi1(aug, pi1, config.tolerance);
  if (pi0.size() != static_cast<std::size_t>(aug.counterfactual_patch_count()))
    throw InvalidInput("pi0 length differs from the counterfactual block");
  double sum = 0.0;
  for (double v : pi0) {
    if (!std::isfinite(v) || v < -config.tolerance || v > 1.0 + config.tolerance)
      throw InvalidInput("pi0 entry outside [0, 1]");
    sum += v;
  }
  if (std::abs(sum - 1.0) > config.tolerance)
    throw InvalidInput("pi0 does not sum to 1");

  const Observables obs = check_observables(aug, pi1, config);
  if (!obs.feasible)
    throw InfeasibleObservables("observed demands are not rationalizable");

  lp::LinearProgram prog = observable_program(aug, pi1);
  for (std::size_t i = 0; i < aug.rows_0.size(); ++i)
    prog.eq.emplace_back(selector_row(aug.matrix, aug.rows_0[i]), pi0[i]);
  return lp::solve(prog, config).status == lp::Status::Optimal;
}

BoundResult counterfactual_event_bounds(const AugmentedSystem& aug,
                                        const DemandProbabilities& pi1,
                                        const Event& event,
                                        const lp::SolveConfig& config) {
  check_event(aug, event);
  const int i0 = aug.counterfactual_patch_count();
  BoundResult res = two_sided(aug, pi1, indicator(i0, event.inner),
                              indicator(i0, event.outer), config);
  if (res.status == BoundStatus::Ok) {
    // Conditional mass within each patch is unrestricted, so event bounds
    // are achieved by placing it inside or outside the event.
    res.lower_attainable = Attainability::Yes;
    res.upper_attainable = Attainability::Yes;
  }
  return res;
}

BoundResult counterfactual_functional_bounds(const AugmentedSystem& aug,
                                             const DemandProbabilities& pi1,
                                             const Vec& g_lo, const Vec& g_hi,
                                             const lp::SolveConfig& config,
                                             const std::vector<char>& lo_attained,
                                             const std::vector<char>& hi_attained) {
  const auto i0 = static_cast<std::size_t>(aug.counterfactual_patch_count());
  if (g_lo.size() != i0 || g_hi.size() != i0)
    throw InvalidInput("functional bound vectors must cover block 0");
  for (std::size_t i = 0; i < i0; ++i) {
    if (g_lo[i] > g_hi[i] + config.tolerance)
      throw InvalidInput("g_lo exceeds g_hi on some patch");
  }
  BoundResult res = two_sided(aug, pi1, g_lo, g_hi, config);
  if (res.status == BoundStatus::Ok) {
    res.lower_attainable = attained_given(aug, res.witness_lower, lo_attained, config.tolerance);
    res.upper_attainable = attained_given(aug, res.witness_upper, hi_attained, config.tolerance);
  }
  return res;
}

BoundResult counterfactual_mean_bounds(const AugmentedSystem& aug,
                                       const DemandProbabilities& pi1,
                                       const Vec& z,
                                       const lp::SolveConfig& config) {
  const int i0 = aug.counterfactual_patch_count();
  Vec g_lo(static_cast<std::size_t>(i0)), g_hi(static_cast<std::size_t>(i0));
  std::vector<char> lo_att(static_cast<std::size_t>(i0)), hi_att(static_cast<std::size_t>(i0));
  for (int i = 0; i < i0; ++i) {
    const Patch& patch = aug.rep().patch(0, i);
    const auto ext = geometry::extremize_linear(z, patch, aug.system, config);
    g_lo[static_cast<std::size_t>(i)] = ext.inf_value;
    g_hi[static_cast<std::size_t>(i)] = ext.sup_value;
    lo_att[static_cast<std::size_t>(i)] = ext.inf_attained ? 1 : 0;
    hi_att[static_cast<std::size_t>(i)] = ext.sup_attained ? 1 : 0;
  }
  return counterfactual_functional_bounds(aug, pi1, g_lo, g_hi, config, lo_att, hi_att);
}

std::pair<Vec, Vec> cdf_coefficients(const AugmentedSystem& aug, const Vec& z,
                                     double t, const lp::SolveConfig& config) {
  const int i0 = aug.counterfactual_patch_count();
  const double tol = aug.system.tolerance;
  Vec lower(static_cast<std::size_t>(i0), 0.0), upper(static_cast<std::size_t>(i0), 0.0);
  for (int i = 0; i < i0; ++i) {
    const Patch& patch = aug.rep().patch(0, i);
    const auto ext = geometry::extremize_linear(z, patch, aug.system, config);
    if (ext.sup_value <= t + tol) lower[static_cast<std::size_t>(i)] = 1.0;
    if (ext.inf_value < t - tol) {
      upper[static_cast<std::size_t>(i)] = 1.0;
    } else if (ext.inf_value > t + tol) {
      upper[static_cast<std::size_t>(i)] = 0.0;
    } else {
      // Boundary case: {z'y = t} supports the patch from below; the patch
      // meets the lower halfspace iff it meets the hyperplane itself.
      upper[static_cast<std::size_t>(i)] =
          geometry::hyperplane_meets_patch(patch, z, t, aug.system, config) ? 1.0 : 0.0;
    }
  }
  return {lower, upper};
}

CdfEnvelope counterfactual_cdf_bounds(const AugmentedSystem& aug,
                                      const DemandProbabilities& pi1,
                                      const Vec& z, const Vec& grid,
                                      const lp::SolveConfig& config) {
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw InvalidInput("cdf grid must be strictly increasing");
  check_pi1(aug, pi1, config.tolerance);
  const Observables obs = check_observables(aug, pi1, config);
  if (!obs.feasible)
    throw InfeasibleObservables("observed demands are not rationalizable");

  CdfEnvelope env;
  env.grid = grid;
  lp::LinearProgram prog = observable_program(aug, pi1);
  for (double t : grid) {
    const auto [glo, ghi] = cdf_coefficients(aug, z, t, config);
    prog.objective = block0_objective(aug, glo);
    prog.sense = lp::Sense::Min;
    const auto lo = lp::solve(prog, config);
    prog.objective = block0_objective(aug, ghi);
    prog.sense = lp::Sense::Max;
    const auto hi = lp::solve(prog, config);
    if (lo.status != lp::Status::Optimal || hi.status != lp::Status::Optimal)
      throw Error("cdf bound program did not solve");
    env.lower.push_back(std::clamp(lo.value, 0.0, 1.0));
    env.upper.push_back(std::clamp(hi.value, 0.0, 1.0));
  }
  return env;
}

bool value_attainable(const AugmentedSystem& aug, const DemandProbabilities& pi1,
                      const Vec& g_lo, const Vec& g_hi, double value,
                      const lp::SolveConfig& config) {
  check_pi1(aug, pi1, config.tolerance);
  lp::LinearProgram prog = observable_program(aug, pi1);
  const Vec obj_lo = block0_objective(aug, g_lo);
  const Vec obj_hi = block0_objective(aug, g_hi);
  if (g_lo == g_hi) {
    prog.eq.emplace_back(obj_lo, value);
  } else {
    prog.ineq.push_back({obj_lo, value, lp::Ineq::Dir::Le});
    prog.ineq.push_back({obj_hi, value, lp::Ineq::Dir::Ge});
  }
  return lp::solve(prog, config).status == lp::Status::Optimal;
}

}  // namespace rum::bounds
