#pragma once

// Shared fixtures and seeded instance generators for the test suites and the
// acceptance harness.

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rum/bounds.hpp"
#include "rum/geometry.hpp"
#include "rum/lp.hpp"
#include "rum/model.hpp"
#include "rum/oracle.hpp"
#include "rum/rational.hpp"

namespace rumtest {

using rum::AugmentedSystem;
using rum::Budget;
using rum::BudgetSystem;
using rum::DemandProbabilities;
using rum::Patch;
using rum::RationalMatrix;
using rum::Sign;
using rum::SignVector;
using rum::Vec;
using rum::VectorRepresentation;

inline BudgetSystem two_budget_system(bool keep_null = false) {
  BudgetSystem s;
  s.budgets = {{"b1", {1.0, 2.0}}, {"b2", {2.0, 1.0}}};
  s.keep_null_patches = keep_null;
  return s;
}

inline BudgetSystem worked_augmented_system(bool keep_null = false) {
  BudgetSystem s = two_budget_system(keep_null);
  s.counterfactual = Budget{"B0", {1.2, 1.2}};
  return s;
}

inline VectorRepresentation representation_of(const BudgetSystem& system) {
  return rum::build_vector_representation(rum::geometry::enumerate_patches(system), system);
}

// The worked observed probabilities (0.5, 0.5 | 0.3, 0.7) over blocks in
// canonical order ((0,-),(0,+) | (-,0),(+,0)).
inline DemandProbabilities worked_pi() {
  DemandProbabilities pi;
  pi.values = {0.5, 0.5, 0.3, 0.7};
  return pi;
}

// Observed block probabilities for the augmented worked example, canonical
// order ((-0-),(-0+),(+0+) | (--0),(-+0),(++0)).
inline DemandProbabilities worked_pi1() {
  DemandProbabilities pi;
  pi.values = {0.5, 0.3, 0.2, 0.3, 0.4, 0.3};
  return pi;
}

inline Vec random_simplex(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vec v(static_cast<std::size_t>(n));
  double total = 0.0;
  for (auto& x : v) {
    x = -std::log(1.0 - unif(rng));
    total += x;
  }
  for (auto& x : v) x /= total;
  return v;
}

// Prices on the half-integer grid {0.5, 1.0, ..., 3.0}.
inline Vec random_grid_price(std::mt19937_64& rng, int k) {
  std::uniform_int_distribution<int> step(1, 6);
  Vec p(static_cast<std::size_t>(k));
  for (auto& v : p) v = 0.5 * step(rng);
  return p;
}

// Planes in special position: some subset of up to K+1 price vectors is
// linearly dependent while the corresponding plane equations stay
// consistent (identical budgets, concurrent triples, shared lines, ...).
inline bool special_position(const BudgetSystem& system) {
  const int n = system.plane_count();
  const int k = system.dimension();
  const int max_size = std::min(n, k + 1);
  for (int size = 2; size <= max_size; ++size) {
    std::vector<int> comb(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) comb[static_cast<std::size_t>(i)] = i;
    while (true) {
      Eigen::MatrixXd m(size, k), maug(size, k + 1);
      for (int r = 0; r < size; ++r) {
        for (int c = 0; c < k; ++c) {
          m(r, c) = system.plane(comb[static_cast<std::size_t>(r)]).p[static_cast<std::size_t>(c)];
          maug(r, c) = m(r, c);
        }
        maug(r, k) = 1.0;
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(m), lua(maug);
      lu.setThreshold(1e-7);
      lua.setThreshold(1e-7);
      if (lu.rank() < size && lua.rank() == lu.rank()) return true;
      int i = size - 1;
      while (i >= 0 && comb[static_cast<std::size_t>(i)] == n - size + i) --i;
      if (i < 0) break;
      ++comb[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < size; ++j) comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return false;
}

// Smallest interior margin over all patches; thin slivers make sampled
// coverage checks flaky, so generators reject them.
inline double min_patch_slack(const BudgetSystem& system) {
  double worst = std::numeric_limits<double>::infinity();
  for (const Patch& p : rum::geometry::enumerate_patches(system)) {
    const auto pc = rum::geometry::patch_constraints(p, system);
    const auto res = rum::lp::max_slack_feasible(system.dimension(), pc.eqs, pc.stricts, {}, {});
    worst = std::min(worst, res.slack);
  }
  return worst;
}

struct SystemSpec {
  int k = 2;
  int j = 2;
  bool with_counterfactual = false;
  double slack_floor = 0.03;
};

// Seeded random budget system on the price grid, resampling degenerate
// coincidences and sliver patches.
inline BudgetSystem random_system(std::mt19937_64& rng, const SystemSpec& spec) {
  for (int attempt = 0; attempt < 5000; ++attempt) {
    BudgetSystem s;
    for (int j = 0; j < spec.j; ++j)
      s.budgets.push_back({"b" + std::to_string(j + 1), random_grid_price(rng, spec.k)});
    if (spec.with_counterfactual)
      s.counterfactual = Budget{"B0", random_grid_price(rng, spec.k)};
    if (special_position(s)) continue;
    if (min_patch_slack(s) < spec.slack_floor) continue;
    return s;
  }
  throw rum::Error("failed to sample a well-separated system");
}

// Push a type mixture through the matrix: the induced patch probabilities.
inline DemandProbabilities pi_from_nu(const RationalMatrix& a, const Vec& nu) {
  DemandProbabilities pi;
  pi.values = a.apply(nu);
  return pi;
}

inline DemandProbabilities pi1_from_nu(const AugmentedSystem& aug, const Vec& nu) {
  const Vec full = aug.matrix.apply(nu);
  DemandProbabilities pi;
  for (int g : aug.rows_1) pi.values.push_back(full[static_cast<std::size_t>(g)]);
  return pi;
}

// A WARP-violating pair: patch a on budget block ja lies strictly below
// budget jb, and patch b on block jb strictly below budget ja.
struct WarpPair {
  int block_a = 0, local_a = 0;
  int block_b = 0, local_b = 0;
};

inline std::optional<WarpPair> find_warp_pair(const VectorRepresentation& rep) {
  for (int ja = 0; ja < rep.blocks(); ++ja) {
    for (int jb = ja + 1; jb < rep.blocks(); ++jb) {
      int la = -1, lb = -1;
      for (int l = 0; l < rep.block_size(ja) && la < 0; ++l)
        if (rep.patch(ja, l).sign[static_cast<std::size_t>(jb)] == Sign::Below) la = l;
      for (int l = 0; l < rep.block_size(jb) && lb < 0; ++l)
        if (rep.patch(jb, l).sign[static_cast<std::size_t>(ja)] == Sign::Below) lb = l;
      if (la >= 0 && lb >= 0) return WarpPair{ja, la, jb, lb};
    }
  }
  return std::nullopt;
}

// Drop observed budget `drop` (index into system.budgets) and re-derive the
// coarse observed probabilities of the reduced augmented system by summing
// the matching refined ones.
struct ReducedInstance {
  AugmentedSystem aug;
  DemandProbabilities pi1;
};

inline ReducedInstance drop_budget(const AugmentedSystem& full,
                                   const DemandProbabilities& full_pi1, int drop,
                                   const rum::lp::SolveConfig& config = {}) {
  BudgetSystem reduced_system = full.system;
  reduced_system.budgets.erase(reduced_system.budgets.begin() + drop);
  ReducedInstance out{rum::rational::build_augmented(reduced_system, config), {}};

  const VectorRepresentation& fr = full.rep();
  const VectorRepresentation& rr = out.aug.rep();
  const int full_j = full.system.observed_count();

  for (int ar = 1; ar < rr.blocks(); ++ar) {
    const int reduced_list = ar - 1;
    const int full_list = reduced_list >= drop ? reduced_list + 1 : reduced_list;
    const int af = 1 + full_list;
    for (int l = 0; l < rr.block_size(ar); ++l) {
      const SignVector& coarse = rr.patch(ar, l).sign;
      double total = 0.0;
      for (int lf = 0; lf < fr.block_size(af); ++lf) {
        const SignVector& fine = fr.patch(af, lf).sign;
        bool match = fine[0] == coarse[0];
        for (int i = 0; match && i < full_j - 1; ++i) {
          const int fi = i >= drop ? i + 1 : i;
          if (fine[static_cast<std::size_t>(1 + fi)] != coarse[static_cast<std::size_t>(1 + i)]) match = false;
        }
        if (match) {
          const int row = fr.global_index(af, lf) - fr.block_size(0);
          total += full_pi1.values[static_cast<std::size_t>(row)];
        }
      }
      out.pi1.values.push_back(total);
    }
  }
  return out;
}

}  // namespace rumtest
