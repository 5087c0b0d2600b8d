// Config parsing and artifact serialization. Every numeric field written
// by the library is formatted at 12 significant digits, locale-independent,
// so outputs for a fixed config and seed are byte-identical across runs
// and worker counts. The run manifest is the only artifact carrying a
// timestamp.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "retsolve/free_boundary.hpp"
#include "retsolve/policy.hpp"
#include "retsolve/simulate.hpp"
#include "retsolve/verify.hpp"

namespace retsolve {

inline constexpr const char* kToolName = "retsolve";
inline constexpr const char* kToolVersion = "0.1.0";

struct SweepSpec {
  std::string param;
  double from = 0, to = 0, step = 0;
};

struct SolverConfig {
  RawParams params;
  GridSpec grid;
  bool has_grid = false;
  SimConfig sim;
  bool has_sim = false;
  std::vector<SweepSpec> sweep;  // empty, one, or two axes
  std::uint64_t config_hash = 0;  // FNV-1a over the raw config bytes
};

// Parses the JSON config document; throws ValidationError with the
// offending field name on structural problems. Numeric model constraints
// are checked later by ModelParams::validate.
SolverConfig parse_config(const std::string& text);
SolverConfig load_config(const std::string& path);

std::uint64_t fnv1a64(std::string_view text);

// %.12g with the C locale; "null" for non-finite values.
std::string format_sig(double x);
// Round through the 12-digit decimal form, for numbers embedded in JSON.
double round_sig(double x);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);
std::string utc_timestamp();

std::string policy_csv(const std::vector<PolicyPoint>& rows);
std::string paths_csv(const std::vector<PathRecord>& paths);

struct SweepRow {
  std::vector<double> values;
  std::string regime;
  std::optional<double> j, z_bar, w_bar;
  std::string error;  // error code name when the point failed to solve
};
std::string sweep_csv(const std::vector<std::string>& names,
                      const std::vector<SweepRow>& rows);

std::string manifest_json(const SolvedModel& m, const SolverConfig& cfg,
                          const std::string& created_utc);
std::string summary_json(const BudgetReport& rep,
                         const std::vector<MartingaleCheck>& martingale,
                         std::uint64_t seed);
std::string verify_json(const std::vector<CheckResult>& checks);

}  // namespace retsolve
