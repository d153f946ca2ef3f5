#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rum/model.hpp"

// Command implementations behind the CLI.  Each returns the process exit
// code: 0 success / rationalizable, 1 not rationalizable, 2 input error,
// 3 infeasible observables.

namespace rum::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNotRationalizable = 1;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitInfeasibleObservables = 3;

struct CommonFlags {
  std::optional<double> tolerance;
  std::optional<bool> keep_null_patches;
  bool exact = false;
  std::optional<long> max_types;
  bool witness = false;
  std::string out_path;  // empty: stdout only
};

int cmd_patches(const std::string& system_path, bool text_mode,
                const CommonFlags& flags, std::ostream& out, std::ostream& err);

int cmd_ingest(const std::string& system_path, const std::string& obs_path,
               const CommonFlags& flags, std::ostream& out, std::ostream& err);

int cmd_test(const std::string& system_path, const std::string& pi_path,
             const CommonFlags& flags, std::ostream& out, std::ostream& err);

struct BoundsQuery {
  enum class Kind { Prob, Mean, Cdf, Functional };
  Kind kind = Kind::Prob;
  std::vector<std::string> patch_ids;  // prob
  Vec z;                               // mean, cdf
  Vec grid;                            // cdf
  std::string glo_path;                // functional
  std::string ghi_path;
};

int cmd_bounds(const std::string& system_path, const std::string& pi_path,
               const BoundsQuery& query, const CommonFlags& flags,
               std::ostream& out, std::ostream& err);

int cmd_matrix(const std::string& system_path, const CommonFlags& flags,
               std::ostream& out, std::ostream& err);

int cmd_oracle_types(const std::string& system_path, const CommonFlags& flags,
                     std::ostream& out, std::ostream& err);

struct OracleBoundsQuery {
  std::vector<std::string> patch_ids;      // indicator objective
  std::string objective_path;              // or explicit objective file
  Vec z;                                   // or mean coefficients from z
  std::string side = "lower";              // lower | upper (z only)
  std::string sense = "min";               // min | max
};

int cmd_oracle_bounds(const std::string& system_path, const std::string& pi_path,
                      const OracleBoundsQuery& query, const CommonFlags& flags,
                      std::ostream& out, std::ostream& err);

int cmd_oracle_cover(const std::string& system_path, long n, std::uint64_t seed,
                     const CommonFlags& flags, std::ostream& out, std::ostream& err);

}  // namespace rum::cli
