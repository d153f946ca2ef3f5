#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "rum/lp.hpp"
#include "rum/model.hpp"

// File formats: system description (JSON), patch probabilities (JSON) and
// raw observations (CSV).

namespace rum::io {

struct SystemFile {
  BudgetSystem system;
  lp::Arithmetic arithmetic = lp::Arithmetic::Float;
  long max_types = 1'000'000;

  lp::SolveConfig solve_config() const;
};

SystemFile parse_system(const std::string& text);
SystemFile load_system(const std::string& path);

/// Per budget id, a map from patch sign string (e.g. "0+-" over the
/// arrangement order, counterfactual first) to probability.
struct PiFile {
  std::map<std::string, std::map<std::string, double>> budgets;
};

PiFile parse_pi(const std::string& text);
PiFile load_pi(const std::string& path);

/// Align a pi file with blocks [first_block, rep.blocks()) of a
/// representation.  Every enumerated patch must be present by sign string;
/// missing or unknown keys are reported by name, so coarse vectors supplied
/// against a refined representation fail with the required patches listed.
DemandProbabilities align_pi(const PiFile& pi, const VectorRepresentation& rep,
                             const BudgetSystem& system, int first_block,
                             double tolerance);

struct Observation {
  std::string budget_id;
  Vec y;
  std::size_t line = 0;
};

/// CSV with header row: budget_id, y_1, ..., y_K.
std::vector<Observation> parse_observations(const std::string& text, int expected_k);
std::vector<Observation> load_observations(const std::string& path, int expected_k);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// Round to 12 significant digits; all numeric CLI output goes through this.
double sig12(double x);
std::string format_number(double x);

}  // namespace rum::io
