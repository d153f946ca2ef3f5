#include "rum/geometry.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace rum::geometry {
namespace {

std::vector<LinearConstraint> closure_constraints(const SignVector& sign,
                                                  const BudgetSystem& system) {
  const int n = system.plane_count();
  const int k = system.dimension();
  std::vector<LinearConstraint> rows;
  rows.reserve(static_cast<std::size_t>(n + k));
  for (int a = 0; a < n; ++a) {
    LinearConstraint c;
    c.a = system.plane(a).p;
    c.b = 1.0;
    switch (sign[static_cast<std::size_t>(a)]) {
      case Sign::On: c.rel = LinearConstraint::Relation::Eq; break;
      case Sign::Below: c.rel = LinearConstraint::Relation::Le; break;
      case Sign::Above: c.rel = LinearConstraint::Relation::Ge; break;
    }
    rows.push_back(std::move(c));
  }
  for (int i = 0; i < k; ++i) {
    LinearConstraint c;
    c.a.assign(static_cast<std::size_t>(k), 0.0);
    c.a[static_cast<std::size_t>(i)] = 1.0;
    c.b = 0.0;
    c.rel = LinearConstraint::Relation::Ge;
    rows.push_back(std::move(c));
  }
  return rows;
}

int equality_rank(const SignVector& sign, const BudgetSystem& system, double tol) {
  const int k = system.dimension();
  std::vector<int> on;
  for (int a = 0; a < system.plane_count(); ++a)
    if (sign[static_cast<std::size_t>(a)] == Sign::On) on.push_back(a);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(on.size()), k);
  for (std::size_t r = 0; r < on.size(); ++r)
    for (int c = 0; c < k; ++c) m(static_cast<Eigen::Index>(r), c) = system.plane(on[r]).p[static_cast<std::size_t>(c)];
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(tol);
  return static_cast<int>(lu.rank());
}

struct SignSearch {
  const BudgetSystem& system;
  const lp::SolveConfig& config;
  EnumerationStats* stats;
  int home;
  std::vector<int> others;  // planes other than home, arrangement order
  SignVector current;
  std::vector<Patch>* out;

  bool region_has_point() {
    std::vector<std::pair<Vec, double>> eqs;
    std::vector<lp::Ineq> stricts;
    for (int a = 0; a < system.plane_count(); ++a) {
      const Sign s = current[static_cast<std::size_t>(a)];
      // Unassigned positions are marked by the caller via a sentinel scan.
      if (!position_active(a)) continue;
      if (s == Sign::On) {
        eqs.emplace_back(system.plane(a).p, 1.0);
      } else {
        lp::Ineq iq;
        iq.a = system.plane(a).p;
        iq.b = 1.0;
        iq.dir = (s == Sign::Below) ? lp::Ineq::Dir::Le : lp::Ineq::Dir::Ge;
        stricts.push_back(std::move(iq));
      }
    }
    const auto res = lp::max_slack_feasible(system.dimension(), eqs, stricts, {}, {}, config);
    if (stats != nullptr) {
      if (res.slack > config.tolerance)
        stats->min_accept_slack = std::min(stats->min_accept_slack, res.slack);
      // Decisions within an order of magnitude of the threshold on either
      // side; structural zeros (empty regions) stay exempt.
      if (res.slack > 0.1 * config.tolerance && res.slack <= 11.0 * config.tolerance)
        ++stats->near_threshold_decisions;
    }
    return res.feasible_with_interior;
  }

  std::vector<char> active;  // per arrangement position

  bool position_active(int a) const { return active[static_cast<std::size_t>(a)] != 0; }

  void recurse(std::size_t next) {
    if (!region_has_point()) return;
    if (next == others.size()) {
      const int dim = system.dimension() - equality_rank(current, system, system.tolerance);
      if (dim < system.dimension() - 1 && !system.keep_null_patches) return;
      Patch p;
      p.home = home;
      p.sign = current;
      p.dimension = dim;
      p.closure = closure_constraints(current, system);
      out->push_back(std::move(p));
      return;
    }
    const int a = others[next];
    active[static_cast<std::size_t>(a)] = 1;
    for (Sign s : {Sign::Below, Sign::On, Sign::Above}) {
      current.signs[static_cast<std::size_t>(a)] = s;
      recurse(next + 1);
    }
    active[static_cast<std::size_t>(a)] = 0;
  }
};

struct PatchSystem {
  lp::LinearProgram lp;             // equalities + weak plane inequalities, y >= 0
  std::vector<char> strict_flags;   // which inequality rows are strict for membership
};

PatchSystem patch_program(const Patch& patch, const BudgetSystem& system) {
  PatchSystem ps;
  ps.lp.num_vars = system.dimension();
  for (int a = 0; a < system.plane_count(); ++a) {
    const Sign s = patch.sign[static_cast<std::size_t>(a)];
    if (s == Sign::On) {
      ps.lp.eq.emplace_back(system.plane(a).p, 1.0);
    } else {
      lp::Ineq iq;
      iq.a = system.plane(a).p;
      iq.b = 1.0;
      iq.dir = (s == Sign::Below) ? lp::Ineq::Dir::Le : lp::Ineq::Dir::Ge;
      ps.lp.ineq.push_back(std::move(iq));
      ps.strict_flags.push_back(1);
    }
  }
  return ps;
}

}  // namespace

PatchConstraints patch_constraints(const Patch& patch, const BudgetSystem& system) {
  PatchConstraints pc;
  for (int a = 0; a < system.plane_count(); ++a) {
    const Sign s = patch.sign[static_cast<std::size_t>(a)];
    if (s == Sign::On) {
      pc.eqs.emplace_back(system.plane(a).p, 1.0);
    } else {
      lp::Ineq iq;
      iq.a = system.plane(a).p;
      iq.b = 1.0;
      iq.dir = (s == Sign::Below) ? lp::Ineq::Dir::Le : lp::Ineq::Dir::Ge;
      pc.stricts.push_back(std::move(iq));
    }
  }
  return pc;
}

std::vector<Patch> enumerate_patches(const BudgetSystem& system,
                                     const lp::SolveConfig& config,
                                     EnumerationStats* stats) {
  system.validate();
  const int n = system.plane_count();
  if (n < 1) throw InvalidInput("patch enumeration requires at least one budget");

  std::vector<Patch> out;
  for (int home = 0; home < n; ++home) {
    SignSearch search{system, config, stats, home, {}, {}, &out, {}};
    search.current.signs.assign(static_cast<std::size_t>(n), Sign::On);
    search.active.assign(static_cast<std::size_t>(n), 0);
    search.active[static_cast<std::size_t>(home)] = 1;
    for (int a = 0; a < n; ++a)
      if (a != home) search.others.push_back(a);
    search.recurse(0);
  }
  return out;
}

PointClassification classify_point(const Vec& y, const BudgetSystem& system) {
  system.validate();
  const int k = system.dimension();
  if (static_cast<int>(y.size()) != k) throw InvalidInput("point dimension differs from K");
  for (double v : y)
    if (v < -system.tolerance) throw InvalidInput("point has a negative coordinate");

  PointClassification pc;
  for (int a = 0; a < system.plane_count(); ++a) {
    const double margin = dot(system.plane(a).p, y) - 1.0;
    const Sign s = sign_of(margin, system.tolerance);
    pc.sign.signs.push_back(s);
    if (s == Sign::On) pc.home_budgets.push_back(a);
  }
  if (pc.home_budgets.empty())
    throw NotOnAnyBudget("point lies on no budget plane");
  return pc;
}

ExtremizationResult extremize_linear(const Vec& z, const Patch& patch,
                                     const BudgetSystem& system,
                                     const lp::SolveConfig& config) {
  if (static_cast<int>(z.size()) != system.dimension())
    throw InvalidInput("objective dimension differs from K");
  PatchSystem ps = patch_program(patch, system);
  ps.lp.objective = z;

  ExtremizationResult res;
  ps.lp.sense = lp::Sense::Min;
  {
    const auto fr = lp::extremize_face(ps.lp, ps.strict_flags, config);
    if (fr.outcome.status != lp::Status::Optimal)
      throw Error("patch closure extremization did not solve (empty or unbounded closure)");
    res.inf_value = fr.outcome.value;
    res.inf_witness = fr.outcome.solution;
    res.inf_attained = fr.attained;
  }
  ps.lp.sense = lp::Sense::Max;
  {
    const auto fr = lp::extremize_face(ps.lp, ps.strict_flags, config);
    if (fr.outcome.status != lp::Status::Optimal)
      throw Error("patch closure extremization did not solve (empty or unbounded closure)");
    res.sup_value = fr.outcome.value;
    res.sup_witness = fr.outcome.solution;
    res.sup_attained = fr.attained;
  }
  return res;
}

bool hyperplane_meets_patch(const Patch& patch, const Vec& z, double t,
                            const BudgetSystem& system,
                            const lp::SolveConfig& config) {
  if (static_cast<int>(z.size()) != system.dimension())
    throw InvalidInput("hyperplane dimension differs from K");
  PatchConstraints pc = patch_constraints(patch, system);
  pc.eqs.emplace_back(z, t);
  const auto res = lp::max_slack_feasible(system.dimension(), pc.eqs, pc.stricts, {}, {}, config);
  return res.feasible_with_interior;
}

std::vector<Vec> closure_vertices(const Patch& patch, const BudgetSystem& system) {
  const int k = system.dimension();
  const double tol = system.tolerance;
  const auto& rows = patch.closure;
  const int m = static_cast<int>(rows.size());
  if (k < 1 || m < k) return {};

  std::vector<Vec> verts;
  std::vector<int> idx(static_cast<std::size_t>(k), 0);
  // All k-subsets of constraint rows, solved as equalities.
  std::vector<int> comb(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) comb[static_cast<std::size_t>(i)] = i;
  auto advance = [&]() -> bool {
    int i = k - 1;
    while (i >= 0 && comb[static_cast<std::size_t>(i)] == m - k + i) --i;
    if (i < 0) return false;
    ++comb[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
    return true;
  };
  do {
    Eigen::MatrixXd a(k, k);
    Eigen::VectorXd b(k);
    for (int r = 0; r < k; ++r) {
      const auto& row = rows[static_cast<std::size_t>(comb[static_cast<std::size_t>(r)])];
      for (int c = 0; c < k; ++c) a(r, c) = row.a[static_cast<std::size_t>(c)];
      b(r) = row.b;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    lu.setThreshold(tol);
    if (lu.rank() < k) continue;
    const Eigen::VectorXd y = lu.solve(b);
    bool ok = true;
    for (const auto& row : rows) {
      double v = 0.0;
      for (int c = 0; c < k; ++c) v += row.a[static_cast<std::size_t>(c)] * y(c);
      const double slack = v - row.b;
      if (row.rel == LinearConstraint::Relation::Eq && std::abs(slack) > 1e3 * tol) ok = false;
      if (row.rel == LinearConstraint::Relation::Le && slack > 1e3 * tol) ok = false;
      if (row.rel == LinearConstraint::Relation::Ge && slack < -1e3 * tol) ok = false;
      if (!ok) break;
    }
    if (!ok) continue;
    Vec v(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) v[static_cast<std::size_t>(c)] = y(c);
    bool dup = false;
    for (const auto& w : verts) {
      double d = 0.0;
      for (int c = 0; c < k; ++c) d = std::max(d, std::abs(w[static_cast<std::size_t>(c)] - v[static_cast<std::size_t>(c)]));
      if (d <= 1e3 * tol) {
        dup = true;
        break;
      }
    }
    if (!dup) verts.push_back(std::move(v));
  } while (advance());

  std::sort(verts.begin(), verts.end());
  return verts;
}

}  // namespace rum::geometry
