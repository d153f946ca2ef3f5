#include "rum/rational.hpp"

#include <algorithm>
#include <functional>

namespace rum::rational {
namespace {

// Tarjan over a small dense adjacency structure.
struct Scc {
  explicit Scc(int n) : n_(n), adj_(static_cast<std::size_t>(n)) {}

  void add_edge(int u, int v) { adj_[static_cast<std::size_t>(u)].push_back(v); }

  std::vector<int> components() {
    comp_.assign(static_cast<std::size_t>(n_), -1);
    index_.assign(static_cast<std::size_t>(n_), -1);
    low_.assign(static_cast<std::size_t>(n_), 0);
    on_stack_.assign(static_cast<std::size_t>(n_), 0);
    stack_.clear();
    next_index_ = 0;
    next_comp_ = 0;
    for (int v = 0; v < n_; ++v)
      if (index_[static_cast<std::size_t>(v)] < 0) strong_connect(v);
    return comp_;
  }

 private:
  void strong_connect(int v) {
    index_[static_cast<std::size_t>(v)] = low_[static_cast<std::size_t>(v)] = next_index_++;
    stack_.push_back(v);
    on_stack_[static_cast<std::size_t>(v)] = 1;
    for (int w : adj_[static_cast<std::size_t>(v)]) {
      if (index_[static_cast<std::size_t>(w)] < 0) {
        strong_connect(w);
        low_[static_cast<std::size_t>(v)] = std::min(low_[static_cast<std::size_t>(v)], low_[static_cast<std::size_t>(w)]);
      } else if (on_stack_[static_cast<std::size_t>(w)]) {
        low_[static_cast<std::size_t>(v)] = std::min(low_[static_cast<std::size_t>(v)], index_[static_cast<std::size_t>(w)]);
      }
    }
    if (low_[static_cast<std::size_t>(v)] == index_[static_cast<std::size_t>(v)]) {
      while (true) {
        const int w = stack_.back();
        stack_.pop_back();
        on_stack_[static_cast<std::size_t>(w)] = 0;
        comp_[static_cast<std::size_t>(w)] = next_comp_;
        if (w == v) break;
      }
      ++next_comp_;
    }
  }

  int n_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> comp_, index_, low_;
  std::vector<char> on_stack_;
  std::vector<int> stack_;
  int next_index_ = 0, next_comp_ = 0;
};

// Fatal iff some strict edge has both endpoints in one strongly connected
// component of the weak+strict graph, restricted to the chosen budgets.
bool fatal_on_prefix(const VectorRepresentation& rep, const std::vector<int>& sel,
                     int chosen_count) {
  Scc scc(chosen_count);
  std::vector<std::pair<int, int>> strict;
  for (int k = 0; k < chosen_count; ++k) {
    const Patch& x = rep.patch(k, sel[static_cast<std::size_t>(k)]);
    for (int j = 0; j < chosen_count; ++j) {
      if (j == k) continue;
      const Sign s = x.sign[static_cast<std::size_t>(j)];
      if (s == Sign::Above) continue;
      scc.add_edge(j, k);
      if (s == Sign::Below) strict.emplace_back(j, k);
    }
  }
  if (strict.empty()) return false;
  const std::vector<int> comp = scc.components();
  for (const auto& [u, v] : strict)
    if (comp[static_cast<std::size_t>(u)] == comp[static_cast<std::size_t>(v)]) return true;
  return false;
}

}  // namespace

PreferenceGraph PreferenceGraph::from_assignment(const PatchAssignment& assignment,
                                                 const VectorRepresentation& rep) {
  PreferenceGraph g;
  g.nodes = rep.blocks();
  if (static_cast<int>(assignment.chosen.size()) != g.nodes)
    throw InvalidInput("assignment length differs from the number of budgets");
  for (int k = 0; k < g.nodes; ++k) {
    if (!assignment.chosen[static_cast<std::size_t>(k)]) continue;
    const int local = *assignment.chosen[static_cast<std::size_t>(k)];
    if (local < 0 || local >= rep.block_size(k))
      throw InvalidInput("assignment selects a patch outside its block");
    const Patch& x = rep.patch(k, local);
    for (int j = 0; j < g.nodes; ++j) {
      if (j == k || !assignment.chosen[static_cast<std::size_t>(j)]) continue;
      switch (x.sign[static_cast<std::size_t>(j)]) {
        case Sign::On: g.weak_edges.emplace_back(j, k); break;
        case Sign::Below: g.strict_edges.emplace_back(j, k); break;
        case Sign::Above: break;
      }
    }
  }
  return g;
}

bool PreferenceGraph::has_fatal_cycle() const {
  if (strict_edges.empty()) return false;
  Scc scc(nodes);
  for (const auto& [u, v] : weak_edges) scc.add_edge(u, v);
  for (const auto& [u, v] : strict_edges) scc.add_edge(u, v);
  const std::vector<int> comp = scc.components();
  for (const auto& [u, v] : strict_edges)
    if (comp[static_cast<std::size_t>(u)] == comp[static_cast<std::size_t>(v)]) return true;
  return false;
}

bool is_rational(const PatchAssignment& assignment, const VectorRepresentation& rep) {
  for (const auto& c : assignment.chosen)
    if (!c) throw InvalidInput("is_rational requires a complete assignment");
  return !PreferenceGraph::from_assignment(assignment, rep).has_fatal_cycle();
}

RationalMatrix enumerate_types(const VectorRepresentation& rep, long column_cap) {
  const int n = rep.blocks();
  RationalMatrix mat;
  mat.rows = rep;

  std::vector<int> sel(static_cast<std::size_t>(n), 0);
  std::function<void(int)> dfs = [&](int a) {
    if (a == n) {
      if (static_cast<long>(mat.columns.size()) >= column_cap)
        throw ColumnLimitExceeded("rational type count exceeds the configured cap of " +
                                  std::to_string(column_cap));
      mat.columns.push_back(sel);
      return;
    }
    for (int local = 0; local < rep.block_size(a); ++local) {
      sel[static_cast<std::size_t>(a)] = local;
      if (!fatal_on_prefix(rep, sel, a + 1)) dfs(a + 1);
    }
  };
  dfs(0);
  return mat;
}

AugmentedSystem build_augmented(const BudgetSystem& system,
                                const lp::SolveConfig& config,
                                long column_cap) {
  if (!system.has_counterfactual())
    throw InvalidInput("build_augmented requires a counterfactual budget");
  system.validate();

  AugmentedSystem aug;
  aug.system = system;
  auto patches = geometry::enumerate_patches(system, config);
  auto rep = build_vector_representation(std::move(patches), system);
  aug.matrix = enumerate_types(rep, column_cap);

  const VectorRepresentation& r = aug.rep();
  const int block0 = r.block_size(0);
  for (int g = 0; g < r.total(); ++g) {
    if (g < block0)
      aug.rows_0.push_back(g);
    else
      aug.rows_1.push_back(g);
  }

  const BudgetSystem observed = system.without_counterfactual();
  if (observed.plane_count() > 0) {
    auto obs_patches = geometry::enumerate_patches(observed, config);
    aug.observed_rep = build_vector_representation(std::move(obs_patches), observed);
    aug.refinement_map.assign(static_cast<std::size_t>(aug.observed_rep.total()), {});
    for (int g = 0; g < aug.observed_rep.total(); ++g) {
      const auto [a_obs, local] = aug.observed_rep.locate(g);
      const Patch& orig = aug.observed_rep.patch(a_obs, local);
      const int a_aug = a_obs + 1;
      for (int l = 0; l < r.block_size(a_aug); ++l) {
        const Patch& fine = r.patch(a_aug, l);
        bool match = true;
        for (int j = 0; j < observed.plane_count(); ++j) {
          if (fine.sign[static_cast<std::size_t>(j + 1)] != orig.sign[static_cast<std::size_t>(j)]) {
            match = false;
            break;
          }
        }
        if (match)
          aug.refinement_map[static_cast<std::size_t>(g)].push_back(r.global_index(a_aug, l));
      }
      if (aug.refinement_map[static_cast<std::size_t>(g)].empty())
        throw Error("observed patch lost during refinement");
    }
  }
  return aug;
}

}  // namespace rum::rational
