#include "rum/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "rum/geometry.hpp"

namespace rum::oracle {
namespace {

// Exhaustive check: does any directed cycle (over weak+strict affordability
// edges) contain a strict edge?  Walks every simple path; no SCC machinery.
struct CycleSearch {
  int n;
  std::vector<std::vector<char>> weak;    // weak or strict edge j -> k
  std::vector<std::vector<char>> strict;  // strict edge j -> k

  bool path_exists(int from, int to, std::vector<char>& visited) const {
    if (from == to) return true;
    for (int next = 0; next < n; ++next) {
      if (visited[static_cast<std::size_t>(next)]) continue;
      if (!weak[static_cast<std::size_t>(from)][static_cast<std::size_t>(next)]) continue;
      visited[static_cast<std::size_t>(next)] = 1;
      if (path_exists(next, to, visited)) return true;
      visited[static_cast<std::size_t>(next)] = 0;
    }
    return false;
  }

  bool has_strict_cycle() const {
    for (int u = 0; u < n; ++u) {
      for (int v = 0; v < n; ++v) {
        if (!strict[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)]) continue;
        std::vector<char> visited(static_cast<std::size_t>(n), 0);
        visited[static_cast<std::size_t>(v)] = 1;
        if (path_exists(v, u, visited)) return true;
      }
    }
    return false;
  }
};

bool combo_rational(const VectorRepresentation& rep, const std::vector<int>& sel) {
  const int n = rep.blocks();
  CycleSearch cs;
  cs.n = n;
  cs.weak.assign(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(n), 0));
  cs.strict.assign(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(n), 0));
  for (int k = 0; k < n; ++k) {
    const Patch& x = rep.patch(k, sel[static_cast<std::size_t>(k)]);
    for (int j = 0; j < n; ++j) {
      if (j == k) continue;
      const Sign s = x.sign[static_cast<std::size_t>(j)];
      if (s == Sign::Above) continue;
      cs.weak[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = 1;
      if (s == Sign::Below) cs.strict[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = 1;
    }
  }
  return !cs.has_strict_cycle();
}

}  // namespace

RationalMatrix brute_force_types(const VectorRepresentation& rep, long combo_cap) {
  const int n = rep.blocks();
  long combos = 1;
  for (int a = 0; a < n; ++a) {
    combos *= rep.block_size(a);
    if (combos > combo_cap)
      throw SizeCapExceeded("patch combination count exceeds the brute-force cap");
  }

  RationalMatrix mat;
  mat.rows = rep;
  std::vector<int> sel(static_cast<std::size_t>(n), 0);
  while (true) {
    if (combo_rational(rep, sel)) mat.columns.push_back(sel);
    int a = n - 1;
    while (a >= 0 && sel[static_cast<std::size_t>(a)] + 1 == rep.block_size(a)) {
      sel[static_cast<std::size_t>(a)] = 0;
      --a;
    }
    if (a < 0) break;
    ++sel[static_cast<std::size_t>(a)];
  }
  return mat;
}

std::vector<Vec> enumerate_feasible_vertices(const RationalMatrix& A,
                                             const std::vector<int>& row_indices,
                                             const Vec& rhs,
                                             double tolerance,
                                             int h_cap) {
  const int H = A.H();
  if (H > h_cap) throw SizeCapExceeded("vertex enumeration capped at " + std::to_string(h_cap) + " columns");
  if (rhs.size() != row_indices.size()) throw InvalidInput("rhs length differs from the row set");

  const int m = static_cast<int>(row_indices.size()) + 1;
  Eigen::MatrixXd e(m, H);
  Eigen::VectorXd b(m);
  for (int r = 0; r + 1 < m; ++r) {
    const auto [a, local] = A.rows.locate(row_indices[static_cast<std::size_t>(r)]);
    for (int h = 0; h < H; ++h)
      e(r, h) = (A.columns[static_cast<std::size_t>(h)][static_cast<std::size_t>(a)] == local) ? 1.0 : 0.0;
    b(r) = rhs[static_cast<std::size_t>(r)];
  }
  for (int h = 0; h < H; ++h) e(m - 1, h) = 1.0;
  b(m - 1) = 1.0;

  Eigen::FullPivLU<Eigen::MatrixXd> full_lu(e);
  full_lu.setThreshold(tolerance);
  const int rank = static_cast<int>(full_lu.rank());

  std::vector<Vec> vertices;
  std::vector<int> comb(static_cast<std::size_t>(rank));
  for (int i = 0; i < rank; ++i) comb[static_cast<std::size_t>(i)] = i;
  const double accept_tol = 1e-8;
  while (true) {
    Eigen::MatrixXd es(m, rank);
    for (int c = 0; c < rank; ++c) es.col(c) = e.col(comb[static_cast<std::size_t>(c)]);
    const Eigen::VectorXd xs = es.colPivHouseholderQr().solve(b);
    const double resid = (es * xs - b).lpNorm<Eigen::Infinity>();
    if (resid <= accept_tol && xs.minCoeff() >= -accept_tol) {
      Vec nu(static_cast<std::size_t>(H), 0.0);
      for (int c = 0; c < rank; ++c)
        nu[static_cast<std::size_t>(comb[static_cast<std::size_t>(c)])] = std::max(0.0, xs(c));
      vertices.push_back(std::move(nu));
    }
    int i = rank - 1;
    while (i >= 0 && comb[static_cast<std::size_t>(i)] == H - rank + i) --i;
    if (i < 0) break;
    ++comb[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < rank; ++j) comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
  }
  if (vertices.empty())
    throw InfeasibleObservables("no feasible basic solution: observables are infeasible");
  return vertices;
}

double vertex_enumerate_bounds(const AugmentedSystem& aug,
                               const DemandProbabilities& pi1,
                               const Vec& objective_over_block0,
                               lp::Sense sense,
                               double tolerance,
                               int h_cap) {
  if (objective_over_block0.size() != static_cast<std::size_t>(aug.counterfactual_patch_count()))
    throw InvalidInput("objective length differs from block 0");
  const auto vertices = enumerate_feasible_vertices(aug.matrix, aug.rows_1, pi1.values,
                                                    tolerance, h_cap);
  double best = 0.0;
  bool first = true;
  for (const Vec& nu : vertices) {
    double value = 0.0;
    for (int h = 0; h < aug.matrix.H(); ++h) {
      const int sel0 = aug.matrix.columns[static_cast<std::size_t>(h)][0];
      value += objective_over_block0[static_cast<std::size_t>(sel0)] * nu[static_cast<std::size_t>(h)];
    }
    if (first || (sense == lp::Sense::Min ? value < best : value > best)) {
      best = value;
      first = false;
    }
  }
  return best;
}

bool CoverReport::clean() const {
  for (const auto& b : budgets)
    if (!b.missing.empty() || !b.extraneous.empty()) return false;
  return true;
}

CoverReport sample_patch_cover(const BudgetSystem& system, long n, std::uint64_t seed) {
  if (n < 1) throw InvalidInput("sample count must be at least 1");
  system.validate();
  const auto patches = geometry::enumerate_patches(system);
  const auto rep = build_vector_representation(patches, system);

  const int k = system.dimension();
  const double tol = system.tolerance;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  CoverReport report;
  report.samples_per_budget = n;
  report.seed = seed;

  for (int a = 0; a < system.plane_count(); ++a) {
    CoverReport::BudgetCover cover;
    cover.budget_id = system.plane(a).id;
    const Vec& p = system.plane(a).p;

    for (long s = 0; s < n; ++s) {
      Vec y(static_cast<std::size_t>(k));
      bool clean_draw = false;
      for (int attempt = 0; attempt < 1000 && !clean_draw; ++attempt) {
        double total = 0.0;
        Vec x(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) {
          x[static_cast<std::size_t>(i)] = -std::log(1.0 - unif(rng));
          total += x[static_cast<std::size_t>(i)];
        }
        clean_draw = true;
        for (int i = 0; i < k; ++i)
          y[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] / (total * p[static_cast<std::size_t>(i)]);
        for (int m = 0; m < system.plane_count() && clean_draw; ++m) {
          if (m == a) continue;
          if (std::abs(dot(system.plane(m).p, y) - 1.0) <= 10.0 * tol) clean_draw = false;
        }
      }
      if (!clean_draw) throw Error("could not sample a point away from foreign planes");

      SignVector sv;
      for (int m = 0; m < system.plane_count(); ++m)
        sv.signs.push_back(m == a ? Sign::On : sign_of(dot(system.plane(m).p, y) - 1.0, tol));
      ++cover.hits[sv.str()];
    }

    for (int l = 0; l < rep.block_size(a); ++l) {
      const Patch& patch = rep.patch(a, l);
      if (patch.dimension != k - 1) continue;
      if (cover.hits.find(patch.sign.str()) == cover.hits.end())
        cover.missing.push_back(patch.sign.str());
    }
    for (const auto& [sign_str, count] : cover.hits) {
      if (rep.find_in_block(a, SignVector::parse(sign_str)) < 0)
        cover.extraneous.push_back(sign_str);
    }
    report.budgets.push_back(std::move(cover));
  }
  return report;
}

}  // namespace rum::oracle
