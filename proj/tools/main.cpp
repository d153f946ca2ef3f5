#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rum/commands.hpp"
#include "rum/model.hpp"

namespace {

rum::Vec parse_vec(const std::string& csv, const std::string& what) {
  rum::Vec v;
  std::istringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      v.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw CLI::ValidationError(what, "'" + tok + "' is not a number");
    }
  }
  if (v.empty()) throw CLI::ValidationError(what, "expected a comma-separated list of numbers");
  return v;
}

std::vector<std::string> parse_list(const std::string& csv) {
  std::vector<std::string> out;
  std::istringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rationalizability tests and sharp counterfactual demand bounds "
               "for stochastic demand on linear budgets"};
  app.require_subcommand(1);

  rum::cli::CommonFlags flags;
  std::string system_path, pi_path, obs_path;
  double tolerance = 0.0;
  bool keep_null = false;
  long max_types = 0;

  const auto add_common = [&](CLI::App* cmd, bool needs_system = true) {
    if (needs_system) cmd->add_option("--system", system_path, "system JSON file")->required();
    cmd->add_option("--tolerance", tolerance, "numerical tolerance")
        ->each([&](const std::string&) { flags.tolerance = tolerance; });
    cmd->add_flag("--keep-null-patches", keep_null, "retain lower-dimensional patches")
        ->each([&](const std::string&) { flags.keep_null_patches = true; });
    cmd->add_flag("--exact", flags.exact, "exact rational arithmetic");
    cmd->add_option("--max-types", max_types, "cap on enumerated demand types")
        ->each([&](const std::string&) { flags.max_types = max_types; });
    cmd->add_option("--out", flags.out_path, "also write the output to this file");
  };

  // patches
  auto* patches = app.add_subcommand("patches", "enumerate the patch partition");
  bool text_mode = false;
  add_common(patches);
  patches->add_flag("--text", text_mode, "aligned text table instead of JSON");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "empirical patch probabilities from observations");
  add_common(ingest);
  ingest->add_option("--obs", obs_path, "observations CSV file")->required();

  // test
  auto* test = app.add_subcommand("test", "test rationalizability of observed demand");
  add_common(test);
  test->add_option("--pi", pi_path, "patch probabilities JSON file")->required();
  test->add_flag("--witness", flags.witness, "include the mixing weights in the output");

  // bounds
  auto* bounds_cmd = app.add_subcommand("bounds", "sharp counterfactual bounds");
  add_common(bounds_cmd);
  bounds_cmd->add_option("--pi", pi_path, "patch probabilities JSON file")->required();
  bounds_cmd->add_flag("--witness", flags.witness, "include LP witnesses in the output");
  bounds_cmd->require_subcommand(1);
  rum::cli::BoundsQuery query;
  std::string z_csv, grid_csv, patches_csv;

  auto* prob = bounds_cmd->add_subcommand("prob", "event probability bounds");
  prob->fallthrough();
  prob->add_option("--patches", patches_csv, "comma-separated counterfactual patch ids")->required();
  auto* mean = bounds_cmd->add_subcommand("mean", "bounds on E z'y");
  mean->fallthrough();
  mean->add_option("--z", z_csv, "coefficient vector, comma-separated")->required();
  auto* cdf = bounds_cmd->add_subcommand("cdf", "pointwise c.d.f. envelope of z'y");
  cdf->fallthrough();
  cdf->add_option("--z", z_csv, "coefficient vector, comma-separated")->required();
  cdf->add_option("--grid", grid_csv, "strictly increasing t grid, comma-separated")->required();
  auto* functional = bounds_cmd->add_subcommand("functional", "bounds on E g from per-patch envelopes");
  functional->fallthrough();
  functional->add_option("--glo", query.glo_path, "JSON file: patch sign -> inf g")->required();
  functional->add_option("--ghi", query.ghi_path, "JSON file: patch sign -> sup g")->required();

  // matrix
  auto* matrix = app.add_subcommand("matrix", "dump the rational demand matrix");
  add_common(matrix);

  // oracle
  auto* oracle_cmd = app.add_subcommand("oracle", "brute-force reference computations");
  oracle_cmd->require_subcommand(1);
  auto* otypes = oracle_cmd->add_subcommand("types", "brute-force type enumeration");
  add_common(otypes);
  auto* obounds = oracle_cmd->add_subcommand("bounds", "vertex-enumeration bound");
  add_common(obounds);
  obounds->add_option("--pi", pi_path, "patch probabilities JSON file")->required();
  rum::cli::OracleBoundsQuery oquery;
  std::string opatches_csv, oz_csv;
  obounds->add_option("--patches", opatches_csv, "indicator objective over these patches");
  obounds->add_option("--objective", oquery.objective_path, "JSON file: patch sign -> coefficient");
  obounds->add_option("--z", oz_csv, "mean objective from z (with --side)");
  obounds->add_option("--side", oquery.side, "lower|upper patch extrema for --z");
  obounds->add_option("--sense", oquery.sense, "min|max")->required();
  auto* ocover = oracle_cmd->add_subcommand("cover", "sampled patch coverage report");
  add_common(ocover);
  long cover_n = 10000;
  std::uint64_t cover_seed = 1;
  ocover->add_option("--n", cover_n, "samples per budget");
  ocover->add_option("--seed", cover_seed, "sampling seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (patches->parsed())
      return rum::cli::cmd_patches(system_path, text_mode, flags, std::cout, std::cerr);
    if (ingest->parsed())
      return rum::cli::cmd_ingest(system_path, obs_path, flags, std::cout, std::cerr);
    if (test->parsed())
      return rum::cli::cmd_test(system_path, pi_path, flags, std::cout, std::cerr);
    if (bounds_cmd->parsed()) {
      if (prob->parsed()) {
        query.kind = rum::cli::BoundsQuery::Kind::Prob;
        query.patch_ids = parse_list(patches_csv);
      } else if (mean->parsed()) {
        query.kind = rum::cli::BoundsQuery::Kind::Mean;
        query.z = parse_vec(z_csv, "--z");
      } else if (cdf->parsed()) {
        query.kind = rum::cli::BoundsQuery::Kind::Cdf;
        query.z = parse_vec(z_csv, "--z");
        query.grid = parse_vec(grid_csv, "--grid");
      } else {
        query.kind = rum::cli::BoundsQuery::Kind::Functional;
      }
      return rum::cli::cmd_bounds(system_path, pi_path, query, flags, std::cout, std::cerr);
    }
    if (matrix->parsed())
      return rum::cli::cmd_matrix(system_path, flags, std::cout, std::cerr);
    if (oracle_cmd->parsed()) {
      if (otypes->parsed())
        return rum::cli::cmd_oracle_types(system_path, flags, std::cout, std::cerr);
      if (obounds->parsed()) {
        oquery.patch_ids = parse_list(opatches_csv);
        if (!oz_csv.empty()) oquery.z = parse_vec(oz_csv, "--z");
        return rum::cli::cmd_oracle_bounds(system_path, pi_path, oquery, flags, std::cout, std::cerr);
      }
      if (ocover->parsed())
        return rum::cli::cmd_oracle_cover(system_path, cover_n, cover_seed, flags, std::cout, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return rum::cli::kExitInputError;
  }
  return rum::cli::kExitInputError;
}
