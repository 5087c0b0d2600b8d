#include "retsolve/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#include "retsolve/numerics.hpp"

namespace retsolve {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::uint64_t splitmix(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void bad_value(const char* field, const char* what) {
  throw ValidationError(ValidationError::Code::BadValue, field, what);
}

// Contiguous blocks over [0, n); the block partition never affects results
// because every path seeds its own generator.
void run_blocks(long n, int workers,
                const std::function<void(long, long)>& body) {
  workers = static_cast<int>(std::min<long>(workers, n));
  if (workers <= 1) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const long chunk = (n + workers - 1) / workers;
  for (int k = 0; k < workers; ++k) {
    const long lo = k * chunk;
    const long hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        body(lo, hi);
      } catch (...) {
        std::lock_guard<std::mutex> hold(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct MeanStdError {
  double mean = 0;
  double std_error = 0;
};

MeanStdError reduce(const std::vector<double>& sample) {
  MeanStdError out;
  const size_t n = sample.size();
  double sum = 0;
  for (double x : sample) sum += x;
  out.mean = sum / static_cast<double>(n);
  if (n < 2) return out;
  double ss = 0;
  for (double x : sample) {
    const double d = x - out.mean;
    ss += d * d;
  }
  out.std_error =
      std::sqrt(ss / (static_cast<double>(n) * static_cast<double>(n - 1)));
  return out;
}

}  // namespace

PathRng::PathRng(std::uint64_t master_seed, long path_id,
                 std::uint64_t stream) {
  state_ = master_seed;
  (void)splitmix(state_);
  state_ ^= 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(path_id) + 1);
  (void)splitmix(state_);
  state_ ^= 0xbf58476d1ce4e5b9ULL * (stream + 1);
  (void)splitmix(state_);
}

std::uint64_t PathRng::next_u64() { return splitmix(state_); }

double PathRng::uniform() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double PathRng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = kTwoPi * u2;
  cached_ = radius * std::sin(angle);
  has_cached_ = true;
  return radius * std::cos(angle);
}

double PathRng::exponential(double rate) {
  return -std::log(uniform()) / rate;
}

int resolve_workers(int requested) {
  int n = requested;
  if (n <= 0) {
    if (const char* env = std::getenv("SOLVER_THREADS")) n = std::atoi(env);
  }
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  return std::clamp(n, 1, 64);
}

void validate_sim_config(const SimConfig& cfg) {
  if (cfg.n_paths < 1) bad_value("sim.n_paths", "n_paths must be at least 1");
  if (!(cfg.dt > 0) || !std::isfinite(cfg.dt)) {
    bad_value("sim.dt", "dt must be positive and finite");
  }
  if (!(cfg.horizon_years >= cfg.dt) || !std::isfinite(cfg.horizon_years)) {
    bad_value("sim.horizon_years", "horizon_years must be at least dt");
  }
  if (cfg.z0.has_value() == cfg.w0.has_value()) {
    bad_value("sim.z0", "exactly one of z0 and w0 must be given");
  }
  if (cfg.z0 && (!(*cfg.z0 > 0) || !std::isfinite(*cfg.z0))) {
    bad_value("sim.z0", "z0 must be positive and finite");
  }
  if (cfg.w0 && !std::isfinite(*cfg.w0)) {
    bad_value("sim.w0", "w0 must be finite");
  }
}

double resolve_initial_dual(const SolvedModel& m, const SimConfig& cfg) {
  if (cfg.z0) return *cfg.z0;
  return dual_of_wealth(m, cfg.phase, *cfg.w0);
}

const char* to_string(PathStatus status) {
  switch (status) {
    case PathStatus::Working: return "Working";
    case PathStatus::VoluntarilyRetired: return "VoluntarilyRetired";
    case PathStatus::DisasterRetired: return "DisasterRetired";
  }
  return "Unknown";
}

PostDisasterPolicy post_disaster_policy(const ModelParams& p, double wealth) {
  const double x = wealth + p.support_l / p.merton_k;
  if (!(x > 0) || !std::isfinite(x)) {
    throw NumericError(
        NumericError::Code::InsolventAtDisaster,
        "wealth plus support value must be positive at the disaster");
  }
  PostDisasterPolicy pol;
  pol.consumption = p.merton_k * x;
  pol.portfolio = p.theta / (p.sigma * p.gamma) * x;
  return pol;
}

PathRecord simulate_path(const SolvedModel& m, const SimConfig& cfg,
                         long path_id) {
  validate_sim_config(cfg);
  const ModelParams& p = m.params;
  const double z0 = resolve_initial_dual(m, cfg);
  const long n_steps = std::lround(cfg.horizon_years / cfg.dt);
  const double dt = cfg.dt;
  const double sqrt_dt = std::sqrt(dt);
  const double beta = p.discount_effective();
  const double z_drift = (beta - p.r - 0.5 * p.theta * p.theta) * dt;
  const double z_vol = -p.theta * sqrt_dt;
  const double support_value = p.support_l / p.merton_k;
  const double x_sigma = p.theta / p.gamma;
  const double x_drift =
      (p.r + p.theta * p.theta / p.gamma - p.merton_k -
       0.5 * x_sigma * x_sigma) *
      dt;
  const double x_vol = x_sigma * sqrt_dt;

  PathRng rng(cfg.master_seed, path_id, 0);
  std::optional<double> disaster_time;
  if (cfg.overlay_disaster && cfg.phase == Phase::PreRetirement) {
    PathRng clock(cfg.master_seed, path_id, 1);
    disaster_time = clock.exponential(p.delta);
  }

  PathRecord rec;
  rec.path_id = path_id;
  const size_t len = static_cast<size_t>(n_steps) + 1;
  rec.t.reserve(len);
  rec.z.reserve(len);
  rec.wealth.reserve(len);
  rec.consumption.reserve(len);
  rec.portfolio.reserve(len);
  rec.status.reserve(len);

  PathStatus status = cfg.phase == Phase::PostRetirement
                          ? PathStatus::VoluntarilyRetired
                          : PathStatus::Working;
  if (status == PathStatus::VoluntarilyRetired) rec.retirement_time = 0.0;
  double ln_z = std::log(z0);
  double ln_x = 0;
  const std::optional<double>& z_bar = m.boundary.z_bar;

  for (long i = 0; i <= n_steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    const double z = std::exp(ln_z);
    if (status == PathStatus::Working) {
      if (z_bar && z <= *z_bar) {
        status = PathStatus::VoluntarilyRetired;
        rec.retirement_time = t;
      } else if (disaster_time && *disaster_time <= t) {
        status = PathStatus::DisasterRetired;
        rec.disaster_time = disaster_time;
        const double x0 =
            wealth_of_dual(m, Phase::PreRetirement, z) + support_value;
        if (!(x0 > 0)) {
          throw NumericError(
              NumericError::Code::InsolventAtDisaster,
              "wealth plus support value must be positive at the disaster");
        }
        ln_x = std::log(x0);
      }
    }
    rec.t.push_back(t);
    rec.z.push_back(z);
    rec.status.push_back(status);
    if (status == PathStatus::DisasterRetired) {
      const double x = std::exp(ln_x);
      const PostDisasterPolicy pol = post_disaster_policy(p, x - support_value);
      rec.wealth.push_back(x - support_value);
      rec.consumption.push_back(pol.consumption);
      rec.portfolio.push_back(pol.portfolio);
    } else {
      const Phase phase = status == PathStatus::Working
                              ? Phase::PreRetirement
                              : Phase::PostRetirement;
      rec.wealth.push_back(wealth_of_dual(m, phase, z));
      rec.consumption.push_back(consumption(p, phase, z));
      rec.portfolio.push_back(portfolio(m, phase, z));
    }
    if (i == n_steps) break;
    const double shock = rng.normal();
    ln_z += z_drift + z_vol * shock;
    if (status == PathStatus::DisasterRetired) {
      ln_x += x_drift + x_vol * shock;
    }
  }
  return rec;
}

std::vector<PathRecord> simulate_paths(const SolvedModel& m,
                                       const SimConfig& cfg, int workers) {
  validate_sim_config(cfg);
  const long keep =
      cfg.csv_paths < 0 ? cfg.n_paths : std::min(cfg.csv_paths, cfg.n_paths);
  std::vector<PathRecord> out(static_cast<size_t>(keep));
  run_blocks(keep, resolve_workers(workers), [&](long lo, long hi) {
    for (long pid = lo; pid < hi; ++pid) {
      out[static_cast<size_t>(pid)] = simulate_path(m, cfg, pid);
    }
  });
  return out;
}

BudgetReport budget_check(const SolvedModel& m, const SimConfig& cfg,
                          int workers) {
  validate_sim_config(cfg);
  const ModelParams& p = m.params;
  const double z0 = resolve_initial_dual(m, cfg);
  const bool pre = cfg.phase == Phase::PreRetirement;
  const long n_steps = std::lround(cfg.horizon_years / cfg.dt);
  const double dt = cfg.dt;
  const double beta = p.discount_effective();
  const double z_drift = (beta - p.r - 0.5 * p.theta * p.theta) * dt;
  const double z_vol = -p.theta * std::sqrt(dt);
  const double disc_step = std::exp(-beta * dt);
  const double inv_gamma = 1.0 / p.gamma;
  const double ln_z0 = std::log(z0);
  const bool has_bar = pre && m.boundary.z_bar.has_value();
  const double ln_z_bar = has_bar ? std::log(*m.boundary.z_bar) : 0.0;
  const double support_l = p.support_l;
  const double income_over_r = (pre ? p.y1 : p.y2) / p.r;

  // f = H_t c_t with H_t = e^(-beta t) z_t / z0, all in log space.
  const auto flow = [&](double lz, double disc) {
    if (pre) return disc * std::exp((1.0 - inv_gamma) * lz - ln_z0);
    const double c = std::exp(-inv_gamma * lz) - support_l;
    if (c <= 0.0) return 0.0;
    return disc * std::exp(lz - ln_z0) * c;
  };

  std::vector<double> sample(static_cast<size_t>(cfg.n_paths));
  std::vector<unsigned char> stopped(static_cast<size_t>(cfg.n_paths), 0);

  run_blocks(cfg.n_paths, resolve_workers(workers), [&](long lo, long hi) {
    for (long pid = lo; pid < hi; ++pid) {
      PathRng rng(cfg.master_seed, pid, 0);
      double ln_z = ln_z0;
      double disc = 1.0;
      double acc = 0.0;
      double prev = flow(ln_z, disc);
      bool hit = false;
      for (long i = 1; i <= n_steps; ++i) {
        ln_z += z_drift + z_vol * rng.normal();
        disc *= disc_step;
        const double f = flow(ln_z, disc);
        acc += 0.5 * (prev + f) * dt;
        prev = f;
        if (has_bar && ln_z <= ln_z_bar) {
          const double h = disc * std::exp(ln_z - ln_z0);
          const double w_stop = -m.dual.derivative(std::exp(ln_z), 1);
          acc += h * (w_stop + income_over_r);
          hit = true;
          break;
        }
      }
      if (pre && !hit) {
        const double h = disc * std::exp(ln_z - ln_z0);
        const double w_final = -m.pre_derivative(std::exp(ln_z), 1);
        acc += h * (w_final + income_over_r);
      }
      sample[static_cast<size_t>(pid)] = acc;
      stopped[static_cast<size_t>(pid)] = hit ? 1 : 0;
    }
  });

  const MeanStdError stats = reduce(sample);
  BudgetReport rep;
  rep.phase = to_string(cfg.phase);
  rep.estimate = stats.mean;
  rep.std_error = stats.std_error;
  const double w0 =
      cfg.w0 ? *cfg.w0 : wealth_of_dual(m, cfg.phase, z0);
  rep.target = w0 + income_over_r;
  if (!pre) {
    const double k_eff = p.merton_k_effective();
    const double horizon = static_cast<double>(n_steps) * dt;
    rep.tail_bound =
        std::pow(z0, -inv_gamma) * std::exp(-k_eff * horizon) / k_eff;
  }
  rep.pass = std::abs(rep.estimate - rep.target) <=
             3.0 * rep.std_error + rep.tail_bound;
  rep.n_paths = cfg.n_paths;
  rep.horizon = static_cast<double>(n_steps) * dt;
  rep.dt = dt;
  rep.z0 = z0;
  rep.transversality_term = pre;
  long hits = 0;
  for (unsigned char s : stopped) hits += s;
  rep.paths_stopped = hits;
  return rep;
}

std::vector<MartingaleCheck> martingale_check(const SolvedModel& m, double z0,
                                              std::uint64_t seed, long n_paths,
                                              std::vector<double> times,
                                              int workers) {
  if (n_paths < 1) bad_value("sim.n_paths", "n_paths must be at least 1");
  if (!(z0 > 0) || !std::isfinite(z0)) {
    bad_value("sim.z0", "z0 must be positive and finite");
  }
  if (times.empty()) bad_value("sim.times", "at least one time is required");
  std::sort(times.begin(), times.end());
  if (!(times.front() > 0)) bad_value("sim.times", "times must be positive");

  const ModelParams& p = m.params;
  const double beta = p.discount_effective();
  const double drift_rate = beta - p.r - 0.5 * p.theta * p.theta;
  const size_t n_times = times.size();

  std::vector<std::vector<double>> samples(
      n_times, std::vector<double>(static_cast<size_t>(n_paths)));

  run_blocks(n_paths, resolve_workers(workers), [&](long lo, long hi) {
    for (long pid = lo; pid < hi; ++pid) {
      PathRng rng(seed, pid, 0);
      double ln_z = std::log(z0);
      double t_prev = 0;
      for (size_t k = 0; k < n_times; ++k) {
        const double step = times[k] - t_prev;
        if (step > 0) {
          ln_z += drift_rate * step -
                  p.theta * std::sqrt(step) * rng.normal();
        }
        samples[k][static_cast<size_t>(pid)] =
            std::exp(-(beta - p.r) * times[k] + ln_z);
        t_prev = times[k];
      }
    }
  });

  std::vector<MartingaleCheck> checks;
  checks.reserve(n_times);
  for (size_t k = 0; k < n_times; ++k) {
    const MeanStdError stats = reduce(samples[k]);
    MartingaleCheck chk;
    chk.t = times[k];
    chk.estimate = stats.mean;
    chk.std_error = stats.std_error;
    chk.target = z0;
    chk.pass = std::abs(chk.estimate - chk.target) <= 3.0 * chk.std_error;
    checks.push_back(chk);
  }
  return checks;
}

}  // namespace retsolve
