// Monte Carlo side: dual-process paths, the income-disaster overlay, and
// the static-budget and martingale consistency checks.
//
// All stepping is exact in log space (geometric Brownian motion has a
// closed-form transition), so estimates carry statistical error and the
// first-order threshold-overshoot bias, but no discretization drift.
// Randomness is keyed by (master_seed, path_id, stream), which makes every
// estimate independent of worker count and path execution order.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "retsolve/free_boundary.hpp"
#include "retsolve/policy.hpp"

namespace retsolve {

class PathRng {
public:
  PathRng(std::uint64_t master_seed, long path_id, std::uint64_t stream);

  double uniform();  // in (0, 1]
  double normal();   // standard normal, Box-Muller
  double exponential(double rate);

private:
  std::uint64_t next_u64();

  std::uint64_t state_ = 0;
  double cached_ = 0;
  bool has_cached_ = false;
};

// Worker count: `requested` if positive, else the SOLVER_THREADS
// environment variable, else the hardware concurrency, clamped to [1, 64].
int resolve_workers(int requested = 0);

struct SimConfig {
  long n_paths = 0;
  long csv_paths = -1;  // paths kept for CSV output; -1 keeps all
  double horizon_years = 0;
  double dt = 1.0 / 252.0;
  std::uint64_t master_seed = 0;
  std::optional<double> z0, w0;  // exactly one must be set
  bool overlay_disaster = false;
  Phase phase = Phase::PreRetirement;
};

// Throws ValidationError if the record is unusable.
void validate_sim_config(const SimConfig& cfg);

// Starting dual point: z0 as given, or inverted from w0.
double resolve_initial_dual(const SolvedModel& m, const SimConfig& cfg);

enum class PathStatus { Working, VoluntarilyRetired, DisasterRetired };
const char* to_string(PathStatus status);

struct PathRecord {
  long path_id = 0;
  std::vector<double> t, z, wealth, consumption, portfolio;
  std::vector<PathStatus> status;
  std::optional<double> retirement_time;  // grid time of the threshold hit
  std::optional<double> disaster_time;    // exact exponential arrival
};

// Merton policy of the disaster-struck agent: with support annuity worth
// L/K on top of financial wealth w, consume K (w + L/K) and hold
// theta/(sigma gamma) (w + L/K) in the risky asset. Throws
// InsolventAtDisaster when w + L/K <= 0.
struct PostDisasterPolicy {
  double consumption = 0;
  double portfolio = 0;
};
PostDisasterPolicy post_disaster_policy(const ModelParams& p, double wealth);

// One path on the time grid i * dt. Streams: 0 drives the Brownian motion,
// 1 the disaster clock, so toggling the overlay never changes the path of
// z. When the threshold hit and the disaster fall in the same step, the
// threshold hit takes priority.
PathRecord simulate_path(const SolvedModel& m, const SimConfig& cfg,
                         long path_id);

// First min(n_paths, csv_paths) paths, in path_id order.
std::vector<PathRecord> simulate_paths(const SolvedModel& m,
                                       const SimConfig& cfg, int workers = 0);

// Static-budget identity E[int_0^tau H c dt + H_tau (W_tau + y/r)]
// = w0 + y/r, estimated by trapezoid accumulation along exact paths.
//   pre phase:  y = y1; paths stopped at the threshold contribute the
//               stopped term, paths alive at the horizon contribute the
//               same term at T (transversality_term), making the identity
//               exact at any horizon and the tail bound zero.
//   post phase: y = y2; the integral is truncated at T and the analytic
//               tail bound z0^(-1/gamma) e^(-K_eff T) / K_eff joins the
//               tolerance.
// pass means |estimate - target| <= 3 std_error + tail_bound.
struct BudgetReport {
  std::string phase;
  double estimate = 0;
  double std_error = 0;
  double target = 0;
  double tail_bound = 0;
  bool pass = false;
  long n_paths = 0;
  double horizon = 0;
  double dt = 0;
  double z0 = 0;
  bool transversality_term = false;
  long paths_stopped = 0;
};
BudgetReport budget_check(const SolvedModel& m, const SimConfig& cfg,
                          int workers = 0);

// E[e^-(rho+delta-r) t z_t] = z0 at each requested time, stepped exactly
// checkpoint to checkpoint. pass means within 3 standard errors.
struct MartingaleCheck {
  double t = 0;
  double estimate = 0;
  double std_error = 0;
  double target = 0;
  bool pass = false;
};
std::vector<MartingaleCheck> martingale_check(const SolvedModel& m, double z0,
                                              std::uint64_t seed, long n_paths,
                                              std::vector<double> times,
                                              int workers = 0);

}  // namespace retsolve
