#include "rum/lp.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <optional>
#include <utility>

#include <boost/multiprecision/gmp.hpp>

namespace rum::lp {
namespace {

using Rational = boost::multiprecision::mpq_rational;

template <class S>
double to_double(const S& x);
template <>
double to_double<double>(const double& x) { return x; }
template <>
double to_double<Rational>(const Rational& x) { return x.convert_to<double>(); }

template <class S>
S from_double(double x) { return S(x); }  // exact: doubles are dyadic rationals

template <class S>
S abs_of(const S& x) { return x < S(0) ? S(-x) : x; }

// General form over scalar S: minimize c.v subject to equalities,
// directional inequalities and per-variable bounds.
template <class S>
struct GeneralProblem {
  int n = 0;
  std::vector<S> c;
  std::vector<std::pair<std::vector<S>, S>> eq;
  struct In {
    std::vector<S> a;
    S b{};
    int dir = -1;  // -1: <=, +1: >=
  };
  std::vector<In> ineq;
  struct Bd {
    std::optional<S> lower;
    std::optional<S> upper;
  };
  std::vector<Bd> bounds;  // size n
};

template <class S>
struct GpResult {
  Status status = Status::Infeasible;
  std::vector<S> x;  // original variable space, when Optimal
  S objective{};     // c.x, when Optimal
};

// One simplex pivot on the tableau plus the active cost row.
template <class S>
void pivot(std::vector<std::vector<S>>& T, std::vector<S>& cost,
           std::vector<int>& basis, int r, int col) {
  const int width = static_cast<int>(T[static_cast<std::size_t>(r)].size());
  auto& row = T[static_cast<std::size_t>(r)];
  const S piv = row[static_cast<std::size_t>(col)];
  for (int k = 0; k < width; ++k) row[static_cast<std::size_t>(k)] /= piv;
  row[static_cast<std::size_t>(col)] = S(1);
  for (std::size_t i = 0; i < T.size(); ++i) {
    if (static_cast<int>(i) == r) continue;
    const S factor = T[i][static_cast<std::size_t>(col)];
    if (factor == S(0)) continue;
    for (int k = 0; k < width; ++k) T[i][static_cast<std::size_t>(k)] -= factor * row[static_cast<std::size_t>(k)];
    T[i][static_cast<std::size_t>(col)] = S(0);
  }
  const S cfac = cost[static_cast<std::size_t>(col)];
  if (cfac != S(0)) {
    for (int k = 0; k < width; ++k) cost[static_cast<std::size_t>(k)] -= cfac * row[static_cast<std::size_t>(k)];
    cost[static_cast<std::size_t>(col)] = S(0);
  }
  basis[static_cast<std::size_t>(r)] = col;
}

// Bland's rule throughout: entering = least index with negative reduced
// cost, leaving = least basic index among minimum-ratio rows.  Returns true
// on optimality, false when the entering column is unbounded.
template <class S>
bool run_pivots(std::vector<std::vector<S>>& T, std::vector<S>& cost,
                std::vector<int>& basis, int allowed_cols, int rhs_col,
                const S& tol, long iter_cap) {
  const int m = static_cast<int>(T.size());
  for (long iter = 0; iter < iter_cap; ++iter) {
    int enter = -1;
    for (int j = 0; j < allowed_cols; ++j) {
      if (cost[static_cast<std::size_t>(j)] < -tol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return true;

    int leave = -1;
    S best{};
    for (int i = 0; i < m; ++i) {
      const S& aij = T[static_cast<std::size_t>(i)][static_cast<std::size_t>(enter)];
      if (!(aij > tol)) continue;
      const S ratio = T[static_cast<std::size_t>(i)][static_cast<std::size_t>(rhs_col)] / aij;
      if (leave < 0) {
        leave = i;
        best = ratio;
      } else if (ratio < best - tol) {
        leave = i;
        best = ratio;
      } else if (ratio - best <= tol && basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)]) {
        leave = i;
        if (ratio < best) best = ratio;
      }
    }
    if (leave < 0) return false;
    pivot(T, cost, basis, leave, enter);
  }
  throw Error("simplex iteration cap exceeded");
}

template <class S>
GpResult<S> solve_general(const GeneralProblem<S>& gp, const S& tol) {
  const int n = gp.n;

  // Quick bound-consistency screen.
  for (int i = 0; i < n; ++i) {
    const auto& bd = gp.bounds[static_cast<std::size_t>(i)];
    if (bd.lower && bd.upper && *bd.lower > *bd.upper) return {};
  }

  // Variable transform to x' >= 0: finite lower bounds shift, free
  // variables split into a difference of two nonnegative parts.
  std::vector<S> shift(static_cast<std::size_t>(n), S(0));
  std::vector<int> pos(static_cast<std::size_t>(n), -1), neg(static_cast<std::size_t>(n), -1);
  int nn = 0;
  for (int i = 0; i < n; ++i) {
    const auto& bd = gp.bounds[static_cast<std::size_t>(i)];
    if (bd.lower) {
      shift[static_cast<std::size_t>(i)] = *bd.lower;
      pos[static_cast<std::size_t>(i)] = nn++;
    } else {
      pos[static_cast<std::size_t>(i)] = nn++;
      neg[static_cast<std::size_t>(i)] = nn++;
    }
  }

  struct Row {
    std::vector<S> a;
    S b{};
    int dir = 0;  // 0 '=', -1 '<=', +1 '>='
  };
  std::vector<Row> rows;
  rows.reserve(gp.eq.size() + gp.ineq.size() + static_cast<std::size_t>(n));

  auto transform = [&](const std::vector<S>& a, const S& b, int dir) {
    Row r;
    r.a.assign(static_cast<std::size_t>(nn), S(0));
    S rhs = b;
    for (int i = 0; i < n; ++i) {
      const S& ai = a[static_cast<std::size_t>(i)];
      if (ai == S(0)) continue;
      r.a[static_cast<std::size_t>(pos[static_cast<std::size_t>(i)])] += ai;
      if (neg[static_cast<std::size_t>(i)] >= 0) r.a[static_cast<std::size_t>(neg[static_cast<std::size_t>(i)])] -= ai;
      rhs -= ai * shift[static_cast<std::size_t>(i)];
    }
    r.b = rhs;
    r.dir = dir;
    rows.push_back(std::move(r));
  };

  for (const auto& [a, b] : gp.eq) transform(a, b, 0);
  for (const auto& iq : gp.ineq) transform(iq.a, iq.b, iq.dir);
  for (int i = 0; i < n; ++i) {
    const auto& bd = gp.bounds[static_cast<std::size_t>(i)];
    if (!bd.upper) continue;
    std::vector<S> a(static_cast<std::size_t>(n), S(0));
    a[static_cast<std::size_t>(i)] = S(1);
    transform(a, *bd.upper, -1);
  }

  // Standard form with b >= 0, slack and artificial columns.
  const int m = static_cast<int>(rows.size());
  for (auto& r : rows) {
    if (r.b < S(0)) {
      for (auto& v : r.a) v = -v;
      r.b = -r.b;
      r.dir = -r.dir;
    }
  }
  int n_slack = 0, n_art = 0;
  for (const auto& r : rows) {
    if (r.dir != 0) ++n_slack;
    if (r.dir >= 0) ++n_art;
  }
  const int slack_start = nn;
  const int art_start = nn + n_slack;
  const int total = art_start + n_art;
  const int rhs_col = total;

  std::vector<std::vector<S>> T(static_cast<std::size_t>(m),
                                std::vector<S>(static_cast<std::size_t>(total + 1), S(0)));
  std::vector<int> basis(static_cast<std::size_t>(m), -1);
  {
    int s = slack_start, a = art_start;
    for (int i = 0; i < m; ++i) {
      auto& trow = T[static_cast<std::size_t>(i)];
      for (int j = 0; j < nn; ++j) trow[static_cast<std::size_t>(j)] = rows[static_cast<std::size_t>(i)].a[static_cast<std::size_t>(j)];
      trow[static_cast<std::size_t>(rhs_col)] = rows[static_cast<std::size_t>(i)].b;
      const int dir = rows[static_cast<std::size_t>(i)].dir;
      if (dir == -1) {
        trow[static_cast<std::size_t>(s)] = S(1);
        basis[static_cast<std::size_t>(i)] = s++;
      } else if (dir == +1) {
        trow[static_cast<std::size_t>(s)] = S(-1);
        ++s;
        trow[static_cast<std::size_t>(a)] = S(1);
        basis[static_cast<std::size_t>(i)] = a++;
      } else {
        trow[static_cast<std::size_t>(a)] = S(1);
        basis[static_cast<std::size_t>(i)] = a++;
      }
    }
  }

  const long iter_cap = 100000 + 200L * (m + total);

  // Phase 1: minimize the sum of artificials.
  if (n_art > 0) {
    std::vector<S> cost(static_cast<std::size_t>(total + 1), S(0));
    for (int j = art_start; j < total; ++j) cost[static_cast<std::size_t>(j)] = S(1);
    for (int i = 0; i < m; ++i) {
      if (basis[static_cast<std::size_t>(i)] >= art_start) {
        for (int k = 0; k <= total; ++k)
          cost[static_cast<std::size_t>(k)] -= T[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
      }
    }
    if (!run_pivots(T, cost, basis, total, rhs_col, tol, iter_cap))
      throw Error("phase-1 objective reported unbounded");
    S phase1 = -cost[static_cast<std::size_t>(rhs_col)];
    S scale = S(1);
    for (const auto& r : rows) scale += abs_of(r.b);
    if (phase1 > tol * scale) return {};

    // Drive leftover artificials out of the basis; rows that cannot pivot
    // are redundant and get dropped.
    std::vector<std::size_t> keep;
    for (int i = 0; i < m; ++i) {
      if (basis[static_cast<std::size_t>(i)] < art_start) {
        keep.push_back(static_cast<std::size_t>(i));
        continue;
      }
      int piv_col = -1;
      for (int j = 0; j < art_start; ++j) {
        if (abs_of(T[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) > tol) {
          piv_col = j;
          break;
        }
      }
      if (piv_col >= 0) {
        pivot(T, cost, basis, i, piv_col);
        keep.push_back(static_cast<std::size_t>(i));
      }
    }
    if (keep.size() != T.size()) {
      std::vector<std::vector<S>> T2;
      std::vector<int> basis2;
      T2.reserve(keep.size());
      basis2.reserve(keep.size());
      for (std::size_t i : keep) {
        T2.push_back(std::move(T[i]));
        basis2.push_back(basis[i]);
      }
      T = std::move(T2);
      basis = std::move(basis2);
    }
  }

  // Phase 2 over the original objective, artificial columns banned.
  {
    std::vector<S> cost(static_cast<std::size_t>(total + 1), S(0));
    for (int i = 0; i < n; ++i) {
      const S& ci = gp.c[static_cast<std::size_t>(i)];
      if (ci == S(0)) continue;
      cost[static_cast<std::size_t>(pos[static_cast<std::size_t>(i)])] += ci;
      if (neg[static_cast<std::size_t>(i)] >= 0) cost[static_cast<std::size_t>(neg[static_cast<std::size_t>(i)])] -= ci;
    }
    for (std::size_t i = 0; i < T.size(); ++i) {
      const S cb = cost[static_cast<std::size_t>(basis[i])];
      if (cb == S(0)) continue;
      for (int k = 0; k <= total; ++k) cost[static_cast<std::size_t>(k)] -= cb * T[i][static_cast<std::size_t>(k)];
      cost[static_cast<std::size_t>(basis[i])] = S(0);
    }
    if (!run_pivots(T, cost, basis, art_start, rhs_col, tol, iter_cap)) {
      GpResult<S> res;
      res.status = Status::Unbounded;
      return res;
    }
  }

  std::vector<S> xprime(static_cast<std::size_t>(total), S(0));
  for (std::size_t i = 0; i < T.size(); ++i) {
    S v = T[i][static_cast<std::size_t>(rhs_col)];
    if (v < S(0)) v = S(0);
    xprime[static_cast<std::size_t>(basis[i])] = v;
  }

  GpResult<S> res;
  res.status = Status::Optimal;
  res.x.assign(static_cast<std::size_t>(n), S(0));
  for (int i = 0; i < n; ++i) {
    S v = shift[static_cast<std::size_t>(i)] + xprime[static_cast<std::size_t>(pos[static_cast<std::size_t>(i)])];
    if (neg[static_cast<std::size_t>(i)] >= 0) v -= xprime[static_cast<std::size_t>(neg[static_cast<std::size_t>(i)])];
    res.x[static_cast<std::size_t>(i)] = v;
  }
  res.objective = S(0);
  for (int i = 0; i < n; ++i) res.objective += gp.c[static_cast<std::size_t>(i)] * res.x[static_cast<std::size_t>(i)];
  return res;
}

void check_finite(const Vec& a) {
  for (double v : a) {
    if (!std::isfinite(v)) throw InvalidInput("non-finite input coefficient");
  }
}

void validate_lp(const LinearProgram& lp) {
  if (lp.num_vars < 0) throw InvalidInput("negative variable count");
  const auto nv = static_cast<std::size_t>(lp.num_vars);
  if (!lp.objective.empty() && lp.objective.size() != nv)
    throw InvalidInput("objective dimension mismatch");
  check_finite(lp.objective);
  for (const auto& [a, b] : lp.eq) {
    if (a.size() != nv) throw InvalidInput("equality row dimension mismatch");
    check_finite(a);
    if (!std::isfinite(b)) throw InvalidInput("non-finite input coefficient");
  }
  for (const auto& iq : lp.ineq) {
    if (iq.a.size() != nv) throw InvalidInput("inequality row dimension mismatch");
    check_finite(iq.a);
    if (!std::isfinite(iq.b)) throw InvalidInput("non-finite input coefficient");
  }
  if (!lp.var_bounds.empty() && lp.var_bounds.size() != nv)
    throw InvalidInput("variable bounds dimension mismatch");
  for (const auto& bd : lp.var_bounds) {
    if (std::isnan(bd.lower) || std::isnan(bd.upper)) throw InvalidInput("NaN variable bound");
    if (bd.lower == std::numeric_limits<double>::infinity())
      throw InvalidInput("lower bound +inf");
    if (bd.upper == -std::numeric_limits<double>::infinity())
      throw InvalidInput("upper bound -inf");
  }
}

template <class S>
GeneralProblem<S> lift(const LinearProgram& lp) {
  GeneralProblem<S> gp;
  gp.n = lp.num_vars;
  gp.c.assign(static_cast<std::size_t>(gp.n), S(0));
  const double flip = (lp.sense == Sense::Max) ? -1.0 : 1.0;
  for (std::size_t i = 0; i < lp.objective.size(); ++i)
    gp.c[i] = from_double<S>(flip * lp.objective[i]);
  for (const auto& [a, b] : lp.eq) {
    std::vector<S> row(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) row[i] = from_double<S>(a[i]);
    gp.eq.emplace_back(std::move(row), from_double<S>(b));
  }
  for (const auto& iq : lp.ineq) {
    typename GeneralProblem<S>::In in;
    in.a.resize(iq.a.size());
    for (std::size_t i = 0; i < iq.a.size(); ++i) in.a[i] = from_double<S>(iq.a[i]);
    in.b = from_double<S>(iq.b);
    in.dir = (iq.dir == Ineq::Dir::Le) ? -1 : +1;
    gp.ineq.push_back(std::move(in));
  }
  gp.bounds.resize(static_cast<std::size_t>(gp.n));
  for (int i = 0; i < gp.n; ++i) {
    VarBounds bd = lp.var_bounds.empty() ? VarBounds{} : lp.var_bounds[static_cast<std::size_t>(i)];
    auto& out = gp.bounds[static_cast<std::size_t>(i)];
    if (std::isfinite(bd.lower)) out.lower = from_double<S>(bd.lower);
    if (std::isfinite(bd.upper)) out.upper = from_double<S>(bd.upper);
  }
  return gp;
}

double max_violation(const LinearProgram& lp, const Vec& x) {
  double worst = 0.0;
  for (const auto& [a, b] : lp.eq) worst = std::max(worst, std::abs(dot(a, x) - b));
  for (const auto& iq : lp.ineq) {
    const double v = dot(iq.a, x);
    worst = std::max(worst, iq.dir == Ineq::Dir::Le ? v - iq.b : iq.b - v);
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    VarBounds bd = lp.var_bounds.empty() ? VarBounds{} : lp.var_bounds[i];
    if (std::isfinite(bd.lower)) worst = std::max(worst, bd.lower - x[i]);
    if (std::isfinite(bd.upper)) worst = std::max(worst, x[i] - bd.upper);
  }
  return worst;
}

template <class S>
Outcome solve_typed(const LinearProgram& lp, const SolveConfig& config) {
  const S tol = (std::is_same_v<S, double>) ? from_double<S>(config.tolerance) : S(0);
  const GpResult<S> r = solve_general(lift<S>(lp), tol);
  Outcome out;
  out.status = r.status;
  if (r.status != Status::Optimal) return out;
  out.solution.resize(r.x.size());
  for (std::size_t i = 0; i < r.x.size(); ++i) out.solution[i] = to_double<S>(r.x[i]);
  S obj{};
  for (std::size_t i = 0; i < lp.objective.size(); ++i)
    obj += from_double<S>(lp.objective[i]) * r.x[i];
  out.value = to_double<S>(obj);
  assert(max_violation(lp, out.solution) <= config.tolerance &&
         "LP witness violates a constraint beyond tolerance");
  assert(std::abs(dot(lp.objective.empty() ? Vec(out.solution.size(), 0.0) : lp.objective,
                      out.solution) - out.value) <= config.tolerance * (1.0 + std::abs(out.value)));
  return out;
}

// Margin-variable reformulation shared by max_slack_feasible and the face
// test in extremize_face: returns the lp with eps appended as last variable.
LinearProgram slack_program(int num_vars,
                            const std::vector<std::pair<Vec, double>>& eqs,
                            const std::vector<Ineq>& strict_ineqs,
                            const std::vector<Ineq>& weak_ineqs,
                            const std::vector<VarBounds>& var_bounds) {
  LinearProgram lp;
  lp.num_vars = num_vars + 1;
  lp.sense = Sense::Max;
  lp.objective.assign(static_cast<std::size_t>(lp.num_vars), 0.0);
  lp.objective.back() = 1.0;
  for (const auto& [a, b] : eqs) {
    Vec row = a;
    row.push_back(0.0);
    lp.eq.emplace_back(std::move(row), b);
  }
  for (const auto& iq : strict_ineqs) {
    Ineq s = iq;
    s.a.push_back(iq.dir == Ineq::Dir::Le ? 1.0 : -1.0);
    lp.ineq.push_back(std::move(s));
  }
  for (const auto& iq : weak_ineqs) {
    Ineq w = iq;
    w.a.push_back(0.0);
    lp.ineq.push_back(std::move(w));
  }
  lp.var_bounds.assign(static_cast<std::size_t>(lp.num_vars), VarBounds{});
  for (std::size_t i = 0; i < var_bounds.size(); ++i) lp.var_bounds[i] = var_bounds[i];
  lp.var_bounds.back() = VarBounds{0.0, 1.0};
  return lp;
}

template <class S>
FaceResult extremize_face_typed(const LinearProgram& lp,
                                const std::vector<char>& strict_ineq,
                                const SolveConfig& config) {
  const S tol = (std::is_same_v<S, double>) ? from_double<S>(config.tolerance) : S(0);
  const GpResult<S> r = solve_general(lift<S>(lp), tol);

  FaceResult fr;
  fr.outcome.status = r.status;
  if (r.status != Status::Optimal) return fr;
  fr.outcome.solution.resize(r.x.size());
  for (std::size_t i = 0; i < r.x.size(); ++i) fr.outcome.solution[i] = to_double<S>(r.x[i]);
  S obj{};
  for (std::size_t i = 0; i < lp.objective.size(); ++i)
    obj += from_double<S>(lp.objective[i]) * r.x[i];
  fr.outcome.value = to_double<S>(obj);

  // Face system: original equalities plus objective pinned at its exact
  // optimum; flagged inequalities turn strict, the rest stay weak, and the
  // margin variable decides whether the face meets the strict region.
  GeneralProblem<S> face;
  face.n = lp.num_vars + 1;
  face.c.assign(static_cast<std::size_t>(face.n), S(0));
  face.c.back() = S(-1);  // maximize eps
  for (const auto& [a, b] : lp.eq) {
    std::vector<S> row(static_cast<std::size_t>(face.n), S(0));
    for (std::size_t i = 0; i < a.size(); ++i) row[i] = from_double<S>(a[i]);
    face.eq.emplace_back(std::move(row), from_double<S>(b));
  }
  {
    std::vector<S> row(static_cast<std::size_t>(face.n), S(0));
    for (std::size_t i = 0; i < lp.objective.size(); ++i) row[i] = from_double<S>(lp.objective[i]);
    face.eq.emplace_back(std::move(row), obj);
  }
  for (std::size_t q = 0; q < lp.ineq.size(); ++q) {
    const Ineq& iq = lp.ineq[q];
    typename GeneralProblem<S>::In in;
    in.a.assign(static_cast<std::size_t>(face.n), S(0));
    for (std::size_t i = 0; i < iq.a.size(); ++i) in.a[i] = from_double<S>(iq.a[i]);
    in.b = from_double<S>(iq.b);
    in.dir = (iq.dir == Ineq::Dir::Le) ? -1 : +1;
    const bool strict = q < strict_ineq.size() && strict_ineq[q];
    if (strict) in.a.back() = (in.dir == -1) ? S(1) : S(-1);
    face.ineq.push_back(std::move(in));
  }
  face.bounds.resize(static_cast<std::size_t>(face.n));
  for (int i = 0; i < lp.num_vars; ++i) {
    VarBounds bd = lp.var_bounds.empty() ? VarBounds{} : lp.var_bounds[static_cast<std::size_t>(i)];
    auto& out = face.bounds[static_cast<std::size_t>(i)];
    if (std::isfinite(bd.lower)) out.lower = from_double<S>(bd.lower);
    if (std::isfinite(bd.upper)) out.upper = from_double<S>(bd.upper);
  }
  face.bounds.back().lower = S(0);
  face.bounds.back().upper = S(1);

  const GpResult<S> fres = solve_general(face, tol);
  if (fres.status == Status::Optimal) {
    const S eps = fres.x.back();
    fr.face_slack = to_double<S>(eps);
    fr.attained = eps > tol;
    fr.face_witness.resize(fres.x.size() - 1);
    for (std::size_t i = 0; i + 1 < fres.x.size(); ++i) fr.face_witness[i] = to_double<S>(fres.x[i]);
  }
  return fr;
}

}  // namespace

Outcome solve(const LinearProgram& lp, const SolveConfig& config) {
  validate_lp(lp);
  if (config.arithmetic == Arithmetic::ExactRational) return solve_typed<Rational>(lp, config);
  return solve_typed<double>(lp, config);
}

SlackResult max_slack_feasible(int num_vars,
                               const std::vector<std::pair<Vec, double>>& eqs,
                               const std::vector<Ineq>& strict_ineqs,
                               const std::vector<Ineq>& weak_ineqs,
                               const std::vector<VarBounds>& var_bounds,
                               const SolveConfig& config) {
  const LinearProgram lp = slack_program(num_vars, eqs, strict_ineqs, weak_ineqs, var_bounds);
  const Outcome out = solve(lp, config);
  SlackResult res;
  if (out.status != Status::Optimal) return res;
  res.slack = out.solution.back();
  res.feasible_with_interior = res.slack > config.tolerance;
  res.witness.assign(out.solution.begin(), out.solution.end() - 1);
  return res;
}

FaceResult extremize_face(const LinearProgram& lp, const std::vector<char>& strict_ineq,
                          const SolveConfig& config) {
  validate_lp(lp);
  if (config.arithmetic == Arithmetic::ExactRational)
    return extremize_face_typed<Rational>(lp, strict_ineq, config);
  return extremize_face_typed<double>(lp, strict_ineq, config);
}

}  // namespace rum::lp
