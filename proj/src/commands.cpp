#include "rum/commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "rum/bounds.hpp"
#include "rum/geometry.hpp"
#include "rum/io.hpp"
#include "rum/oracle.hpp"
#include "rum/rational.hpp"

namespace rum::cli {

using nlohmann::json;

namespace {

struct Loaded {
  io::SystemFile sf;
  lp::SolveConfig cfg;
};

Loaded load(const std::string& system_path, const CommonFlags& flags) {
  Loaded l;
  l.sf = io::load_system(system_path);
  if (flags.tolerance) l.sf.system.tolerance = *flags.tolerance;
  if (flags.keep_null_patches) l.sf.system.keep_null_patches = *flags.keep_null_patches;
  if (flags.exact) l.sf.arithmetic = lp::Arithmetic::ExactRational;
  if (flags.max_types) l.sf.max_types = *flags.max_types;
  l.sf.system.validate();
  l.cfg = l.sf.solve_config();
  return l;
}

void maybe_suggest_exact(const Loaded& l, std::ostream& err) {
  if (l.cfg.arithmetic == lp::Arithmetic::ExactRational) return;
  geometry::EnumerationStats stats;
  geometry::enumerate_patches(l.sf.system, l.cfg, &stats);
  if (stats.near_threshold_decisions > 0) {
    err << "note: " << stats.near_threshold_decisions
        << " patch feasibility decision(s) fell within 10x tolerance of the threshold; "
           "consider rerunning with --exact\n";
  }
}

std::string patch_id(const BudgetSystem& system, const Patch& patch) {
  return system.plane(patch.home).id + ":" + patch.sign.str();
}

json num(double x) { return json(io::sig12(x)); }

json vec_json(const Vec& v) {
  json arr = json::array();
  for (double x : v) arr.push_back(num(x));
  return arr;
}

void emit(const std::string& payload, const CommonFlags& flags, std::ostream& out) {
  out << payload;
  if (!flags.out_path.empty()) io::write_file(flags.out_path, payload);
}

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const InfeasibleObservables& e) {
    err << "error: " << e.what() << "\n";
    return kExitInfeasibleObservables;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

std::string attain_str(bounds::Attainability a) {
  return a == bounds::Attainability::Yes ? "yes" : "unknown";
}

json bound_json(const bounds::BoundResult& r, bool with_witness) {
  json j;
  if (r.status == bounds::BoundStatus::InfeasibleObservables) {
    j["status"] = "infeasible_observables";
    j["l1_residual"] = num(r.l1_residual);
    return j;
  }
  j["status"] = "ok";
  j["lower"] = num(r.lower);
  j["upper"] = num(r.upper);
  j["lower_attainable"] = attain_str(r.lower_attainable);
  j["upper_attainable"] = attain_str(r.upper_attainable);
  if (with_witness) {
    j["witness_lower"] = vec_json(r.witness_lower);
    j["witness_upper"] = vec_json(r.witness_upper);
  }
  return j;
}

// Accepts "0+-" or "B0:0+-".
int resolve_block0_patch(const VectorRepresentation& rep, const std::string& id) {
  std::string sign_part = id;
  const auto colon = id.find(':');
  if (colon != std::string::npos) sign_part = id.substr(colon + 1);
  const int local = rep.find_in_block(0, SignVector::parse(sign_part));
  if (local < 0)
    throw InvalidInput("'" + id + "' matches no counterfactual patch");
  return local;
}

Vec block0_values_from_file(const std::string& path, const AugmentedSystem& aug,
                            const std::string& what) {
  const json j = [&] {
    try {
      return json::parse(io::read_file(path));
    } catch (const json::parse_error& e) {
      throw InvalidInput(what + ": " + e.what());
    }
  }();
  if (!j.is_object()) throw InvalidInput(what + ": expected an object of sign -> value");
  const auto& rep = aug.rep();
  Vec out(static_cast<std::size_t>(rep.block_size(0)), 0.0);
  std::vector<char> seen(out.size(), 0);
  for (const auto& [key, val] : j.items()) {
    if (!val.is_number()) throw InvalidInput(what + ": '" + key + "' is not a number");
    const int local = resolve_block0_patch(rep, key);
    out[static_cast<std::size_t>(local)] = val.get<double>();
    seen[static_cast<std::size_t>(local)] = 1;
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i])
      throw InvalidInput(what + ": missing value for patch '" + rep.patch(0, static_cast<int>(i)).sign.str() + "'");
  }
  return out;
}

}  // namespace

int cmd_patches(const std::string& system_path, bool text_mode,
                const CommonFlags& flags, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const Loaded l = load(system_path, flags);
    maybe_suggest_exact(l, err);
    const auto patches = geometry::enumerate_patches(l.sf.system, l.cfg);
    const auto rep = build_vector_representation(patches, l.sf.system);

    if (text_mode) {
      std::ostringstream os;
      os << std::left << std::setw(18) << "id" << std::setw(10) << "budget"
         << std::setw(10) << "sign" << "dim\n";
      for (const Patch& p : rep.entries) {
        os << std::left << std::setw(18) << patch_id(l.sf.system, p)
           << std::setw(10) << l.sf.system.plane(p.home).id
           << std::setw(10) << p.sign.str() << p.dimension << "\n";
      }
      emit(os.str(), flags, out);
      return kExitOk;
    }

    json j;
    j["K"] = l.sf.system.dimension();
    json planes = json::array();
    for (int a = 0; a < l.sf.system.plane_count(); ++a) planes.push_back(l.sf.system.plane(a).id);
    j["planes"] = planes;
    json jp = json::array();
    for (const Patch& p : rep.entries) {
      json e;
      e["id"] = patch_id(l.sf.system, p);
      e["budget"] = l.sf.system.plane(p.home).id;
      e["sign"] = p.sign.str();
      e["dimension"] = p.dimension;
      if (l.sf.system.dimension() <= 3) {
        json verts = json::array();
        for (const Vec& v : geometry::closure_vertices(p, l.sf.system)) verts.push_back(vec_json(v));
        e["vertices"] = verts;
      }
      jp.push_back(std::move(e));
    }
    j["patches"] = jp;
    emit(j.dump(2) + "\n", flags, out);
    return kExitOk;
  });
}

int cmd_ingest(const std::string& system_path, const std::string& obs_path,
               const CommonFlags& flags, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const Loaded l = load(system_path, flags);
    maybe_suggest_exact(l, err);
    const BudgetSystem& system = l.sf.system;
    const auto observations = io::load_observations(obs_path, system.dimension());
    const auto patches = geometry::enumerate_patches(system, l.cfg);
    const auto rep = build_vector_representation(patches, system);

    std::map<std::string, int> id_to_plane;
    for (int a = 0; a < system.plane_count(); ++a) id_to_plane[system.plane(a).id] = a;

    std::vector<std::map<std::string, long>> counts(static_cast<std::size_t>(system.plane_count()));
    std::vector<long> totals(static_cast<std::size_t>(system.plane_count()), 0);
    json ties = json::array();

    for (const auto& obs : observations) {
      const auto it = id_to_plane.find(obs.budget_id);
      if (it == id_to_plane.end())
        throw InvalidInput("observations line " + std::to_string(obs.line) +
                           ": unknown budget '" + obs.budget_id + "'");
      const int home = it->second;
      const auto cls = geometry::classify_point(obs.y, system);
      if (cls.sign[static_cast<std::size_t>(home)] != Sign::On)
        throw InvalidInput("observations line " + std::to_string(obs.line) +
                           ": point does not lie on budget '" + obs.budget_id + "'");
      const bool tied = cls.home_budgets.size() > 1;
      if (tied) {
        json t;
        t["line"] = obs.line;
        t["budget"] = obs.budget_id;
        t["y"] = vec_json(obs.y);
        t["sign"] = cls.sign.str();
        ties.push_back(std::move(t));
        if (!system.keep_null_patches) continue;
      }
      if (rep.find_in_block(home, cls.sign) < 0)
        throw InvalidInput("observations line " + std::to_string(obs.line) +
                           ": sign '" + cls.sign.str() + "' matches no enumerated patch");
      ++counts[static_cast<std::size_t>(home)][cls.sign.str()];
      ++totals[static_cast<std::size_t>(home)];
    }

    json budgets;
    for (int a = 0; a < system.plane_count(); ++a) {
      if (a == 0 && system.has_counterfactual()) continue;  // nothing observable there
      const std::string& id = system.plane(a).id;
      if (totals[static_cast<std::size_t>(a)] == 0)
        throw InvalidInput("budget '" + id + "' has no usable observations");
      json block;
      for (int lidx = 0; lidx < rep.block_size(a); ++lidx) {
        const std::string key = rep.patch(a, lidx).sign.str();
        const auto cit = counts[static_cast<std::size_t>(a)].find(key);
        const long c = (cit == counts[static_cast<std::size_t>(a)].end()) ? 0 : cit->second;
        block[key] = num(static_cast<double>(c) / static_cast<double>(totals[static_cast<std::size_t>(a)]));
      }
      budgets[id] = std::move(block);
    }

    json j;
    j["budgets"] = std::move(budgets);
    json jcounts;
    for (int a = 0; a < system.plane_count(); ++a) {
      if (a == 0 && system.has_counterfactual()) continue;
      jcounts[system.plane(a).id] = totals[static_cast<std::size_t>(a)];
    }
    j["counts"] = std::move(jcounts);
    j["ties"] = std::move(ties);
    emit(j.dump(2) + "\n", flags, out);
    return kExitOk;
  });
}

int cmd_test(const std::string& system_path, const std::string& pi_path,
             const CommonFlags& flags, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const Loaded l = load(system_path, flags);
    maybe_suggest_exact(l, err);
    const io::PiFile pf = io::load_pi(pi_path);

    bounds::RationalizabilityResult res;
    if (l.sf.system.has_counterfactual()) {
      const auto aug = rational::build_augmented(l.sf.system, l.cfg, l.sf.max_types);
      DemandProbabilities pi1;
      pi1.values = io::align_pi(pf, aug.rep(), l.sf.system, 1, l.sf.system.tolerance).values;
      res = bounds::test_observables(aug, pi1, l.cfg);
    } else {
      const auto patches = geometry::enumerate_patches(l.sf.system, l.cfg);
      const auto rep = build_vector_representation(patches, l.sf.system);
      const auto A = rational::enumerate_types(rep, l.sf.max_types);
      const auto pi = io::align_pi(pf, rep, l.sf.system, 0, l.sf.system.tolerance);
      res = bounds::test_rationalizable(A, pi, l.cfg);
    }

    json j;
    j["rationalizable"] = res.rationalizable;
    j["l1_residual"] = num(res.l1_residual);
    if (flags.witness) j["witness"] = vec_json(res.nu);
    emit(j.dump(2) + "\n", flags, out);
    return res.rationalizable ? kExitOk : kExitNotRationalizable;
  });
}

int cmd_bounds(const std::string& system_path, const std::string& pi_path,
               const BoundsQuery& query, const CommonFlags& flags,
               std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const Loaded l = load(system_path, flags);
    if (!l.sf.system.has_counterfactual())
      throw InvalidInput("bounds require a counterfactual budget in the system file");
    maybe_suggest_exact(l, err);
    const auto aug = rational::build_augmented(l.sf.system, l.cfg, l.sf.max_types);
    const io::PiFile pf = io::load_pi(pi_path);
    DemandProbabilities pi1;
    pi1.values = io::align_pi(pf, aug.rep(), l.sf.system, 1, l.sf.system.tolerance).values;

    const auto finish_bound = [&](const bounds::BoundResult& r) -> int {
      emit(bound_json(r, flags.witness).dump(2) + "\n", flags, out);
      if (r.status == bounds::BoundStatus::InfeasibleObservables) {
        err << "error: observed demands are not rationalizable (l1 residual "
            << io::format_number(r.l1_residual) << ")\n";
        return kExitInfeasibleObservables;
      }
      return kExitOk;
    };

    switch (query.kind) {
      case BoundsQuery::Kind::Prob: {
        std::vector<int> ids;
        for (const std::string& s : query.patch_ids)
          ids.push_back(resolve_block0_patch(aug.rep(), s));
        return finish_bound(bounds::counterfactual_event_bounds(
            aug, pi1, bounds::Event::patch_union(ids), l.cfg));
      }
      case BoundsQuery::Kind::Mean:
        return finish_bound(bounds::counterfactual_mean_bounds(aug, pi1, query.z, l.cfg));
      case BoundsQuery::Kind::Functional: {
        const Vec glo = block0_values_from_file(query.glo_path, aug, "g_lo file");
        const Vec ghi = block0_values_from_file(query.ghi_path, aug, "g_hi file");
        return finish_bound(bounds::counterfactual_functional_bounds(aug, pi1, glo, ghi, l.cfg));
      }
      case BoundsQuery::Kind::Cdf: {
        bounds::CdfEnvelope env;
        try {
          env = bounds::counterfactual_cdf_bounds(aug, pi1, query.z, query.grid, l.cfg);
        } catch (const InfeasibleObservables&) {
          const auto diag = bounds::test_observables(aug, pi1, l.cfg);
          json j;
          j["status"] = "infeasible_observables";
          j["l1_residual"] = num(diag.l1_residual);
          out << j.dump(2) << "\n";
          err << "error: observed demands are not rationalizable (l1 residual "
              << io::format_number(diag.l1_residual) << ")\n";
          return kExitInfeasibleObservables;
        }
        json j;
        j["status"] = "ok";
        j["z"] = vec_json(query.z);
        json rows = json::array();
        std::ostringstream tsv;
        tsv << "t\tlower\tupper\n";
        for (std::size_t i = 0; i < env.grid.size(); ++i) {
          json row;
          row["t"] = num(env.grid[i]);
          row["lower"] = num(env.lower[i]);
          row["upper"] = num(env.upper[i]);
          rows.push_back(std::move(row));
          tsv << io::format_number(env.grid[i]) << "\t" << io::format_number(env.lower[i])
              << "\t" << io::format_number(env.upper[i]) << "\n";
        }
        j["rows"] = std::move(rows);
        out << j.dump(2) << "\n";
        if (!flags.out_path.empty()) {
          const bool tsv_out = flags.out_path.size() >= 4 &&
                               flags.out_path.substr(flags.out_path.size() - 4) == ".tsv";
          io::write_file(flags.out_path, tsv_out ? tsv.str() : j.dump(2) + "\n");
        }
        return kExitOk;
      }
    }
    throw InvalidInput("unknown bounds query");
  });
}

int cmd_matrix(const std::string& system_path, const CommonFlags& flags,
               std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const Loaded l = load(system_path, flags);
    maybe_suggest_exact(l, err);
    const BudgetSystem& system = l.sf.system;

    json j;
    const auto dump_matrix = [&](const RationalMatrix& mat) {
      json rows = json::array();
      for (const Patch& p : mat.rows.entries) {
        json r;
        r["budget"] = system.plane(p.home).id;
        r["sign"] = p.sign.str();
        rows.push_back(std::move(r));
      }
      j["rows"] = std::move(rows);
      j["H"] = mat.H();
      json trips = json::array();
      for (int h = 0; h < mat.H(); ++h) {
        for (int a = 0; a < mat.rows.blocks(); ++a) {
          const int g = mat.rows.global_index(a, mat.columns[static_cast<std::size_t>(h)][static_cast<std::size_t>(a)]);
          trips.push_back(json::array({g, h}));
        }
      }
      j["triplets"] = std::move(trips);
    };

    if (system.has_counterfactual()) {
      const auto aug = rational::build_augmented(system, l.cfg, l.sf.max_types);
      dump_matrix(aug.matrix);
      j["rows_0"] = aug.rows_0;
      j["rows_1"] = aug.rows_1;
    } else {
      const auto patches = geometry::enumerate_patches(system, l.cfg);
      const auto rep = build_vector_representation(patches, system);
      dump_matrix(rational::enumerate_types(rep, l.sf.max_types));
    }
    emit(j.dump(2) + "\n", flags, out);
    return kExitOk;
  });
}

int cmd_oracle_types(const std::string& system_path, const CommonFlags& flags,
                     std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const Loaded l = load(system_path, flags);
    const auto patches = geometry::enumerate_patches(l.sf.system, l.cfg);
    const auto rep = build_vector_representation(patches, l.sf.system);
    const auto mat = oracle::brute_force_types(rep);
    json j;
    j["H"] = mat.H();
    json cols = json::array();
    for (const auto& sel : mat.columns) cols.push_back(sel);
    j["columns"] = std::move(cols);
    emit(j.dump(2) + "\n", flags, out);
    return kExitOk;
  });
}

int cmd_oracle_bounds(const std::string& system_path, const std::string& pi_path,
                      const OracleBoundsQuery& query, const CommonFlags& flags,
                      std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const Loaded l = load(system_path, flags);
    if (!l.sf.system.has_counterfactual())
      throw InvalidInput("oracle bounds require a counterfactual budget");
    const auto aug = rational::build_augmented(l.sf.system, l.cfg, l.sf.max_types);
    const io::PiFile pf = io::load_pi(pi_path);
    DemandProbabilities pi1;
    pi1.values = io::align_pi(pf, aug.rep(), l.sf.system, 1, l.sf.system.tolerance).values;

    Vec objective;
    if (!query.objective_path.empty()) {
      objective = block0_values_from_file(query.objective_path, aug, "objective file");
    } else if (!query.z.empty()) {
      objective.resize(static_cast<std::size_t>(aug.counterfactual_patch_count()));
      for (int i = 0; i < aug.counterfactual_patch_count(); ++i) {
        const auto ext = geometry::extremize_linear(query.z, aug.rep().patch(0, i), l.sf.system, l.cfg);
        objective[static_cast<std::size_t>(i)] = (query.side == "upper") ? ext.sup_value : ext.inf_value;
      }
    } else {
      objective.assign(static_cast<std::size_t>(aug.counterfactual_patch_count()), 0.0);
      for (const std::string& s : query.patch_ids)
        objective[static_cast<std::size_t>(resolve_block0_patch(aug.rep(), s))] = 1.0;
    }
    const lp::Sense sense = (query.sense == "max") ? lp::Sense::Max : lp::Sense::Min;
    const double value = oracle::vertex_enumerate_bounds(aug, pi1, objective, sense);
    json j;
    j["value"] = num(value);
    j["sense"] = query.sense;
    emit(j.dump(2) + "\n", flags, out);
    return kExitOk;
  });
}

int cmd_oracle_cover(const std::string& system_path, long n, std::uint64_t seed,
                     const CommonFlags& flags, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const Loaded l = load(system_path, flags);
    const auto report = oracle::sample_patch_cover(l.sf.system, n, seed);
    json j;
    j["n"] = report.samples_per_budget;
    j["seed"] = report.seed;
    j["clean"] = report.clean();
    json budgets = json::array();
    for (const auto& b : report.budgets) {
      json e;
      e["budget"] = b.budget_id;
      json hits;
      for (const auto& [sign, count] : b.hits) hits[sign] = count;
      e["hits"] = std::move(hits);
      e["missing"] = b.missing;
      e["extraneous"] = b.extraneous;
      budgets.push_back(std::move(e));
    }
    j["budgets"] = std::move(budgets);
    emit(j.dump(2) + "\n", flags, out);
    return kExitOk;
  });
}

}  // namespace rum::cli
