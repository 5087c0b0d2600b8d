#include "retsolve/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "retsolve/numerics.hpp"
#include "retsolve/policy.hpp"
#include "retsolve/simulate.hpp"

namespace retsolve {

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> zs(static_cast<size_t>(n));
  const double span = std::log(hi / lo);
  for (int i = 0; i < n; ++i) {
    zs[static_cast<size_t>(i)] = lo * std::exp(span * i / (n - 1));
  }
  // Exact endpoints: callers sample closed intervals such as (0, z_bar]
  // where one ulp of exp/log roundoff must not cross the boundary.
  zs.front() = lo;
  zs.back() = hi;
  return zs;
}

std::string fmt(const char* pattern, double a, double b = 0, double c = 0) {
  char buf[200];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

class Battery {
public:
  Battery(const SolvedModel& m, const PostRetirementDual& dual,
          const VerifyOptions& opt)
      : m_(m), dual_(dual), opt_(opt) {}

  std::vector<CheckResult> run() {
    check("roots_quadratic", [this](CheckResult& c) { roots(c); });
    check("dual_ode_residual", [this](CheckResult& c) { ode_residual(c); });
    check("smooth_pasting", [this](CheckResult& c) { pasting(c); });
    check("oracle_tail_integral", [this](CheckResult& c) { oracle_tail(c); });
    check("oracle_premium", [this](CheckResult& c) { oracle_premium(c); });
    check("premium_nonnegative", [this](CheckResult& c) { vi_sign(c); });
    check("premium_zero_below_threshold",
          [this](CheckResult& c) { vi_stopped(c); });
    check("premium_smooth_fit", [this](CheckResult& c) { vi_fit(c); });
    check("premium_pde_residual", [this](CheckResult& c) { vi_pde(c); });
    check("free_boundary_residual", [this](CheckResult& c) { boundary(c); });
    check("wealth_map_monotone", [this](CheckResult& c) { wealth_map(c); });
    check("dual_of_wealth_roundtrip", [this](CheckResult& c) { roundtrip(c); });
    check("drift_identity", [this](CheckResult& c) { drift(c); });
    if (opt_.run_monte_carlo) {
      check("martingale_mc", [this](CheckResult& c) { martingale(c); });
      check("budget_mc_pre", [this](CheckResult& c) { budget_pre(c); });
      check("budget_mc_post", [this](CheckResult& c) { budget_post(c); });
      check("mc_determinism", [this](CheckResult& c) { determinism(c); });
      check("hitting_dt_convergence", [this](CheckResult& c) { hitting(c); });
    }
    return std::move(results_);
  }

private:
  void check(const char* name,
             const std::function<void(CheckResult&)>& body) {
    CheckResult c;
    c.name = name;
    c.status = "pass";
    try {
      body(c);
    } catch (const std::exception& e) {
      c.status = "fail";
      c.detail = e.what();
    }
    results_.push_back(std::move(c));
  }

  bool feasible() const {
    return m_.boundary.regime == Regime::RetirementFeasible;
  }

  void note_error(CheckResult& c, double err, double tol) {
    c.error = std::max(c.error, err);
    c.tolerance = std::max(c.tolerance, tol);
    if (err > tol) c.status = "fail";
  }

  void roots(CheckResult& c) {
    const double beta = m_.params.discount_effective();
    c.tolerance = 1e-10;
    for (double root : {m_.roots.m_plus, m_.roots.m_minus}) {
      note_error(c,
                 std::abs(characteristic_quadratic(m_.params, root)) / beta,
                 1e-10);
    }
    const double g = m_.params.gamma;
    const double cap = std::min(0.0, 1.0 - 1.0 / g);
    if (!(m_.roots.m_plus > 1.0) || !(m_.roots.m_minus < cap)) {
      c.status = "fail";
      c.detail = "root ordering violated";
    }
  }

  void ode_residual(CheckResult& c) {
    const double k = dual_.kink();
    c.tolerance = 1e-9;
    for (const auto& zs : {log_grid(k * 1e-3, k * 0.999, 40),
                           log_grid(k * 1.001, k * 1e3, 40)}) {
      for (double z : zs) {
        const double v = dual_.value(z);
        const double scale =
            std::max(1.0, std::abs(m_.params.discount_effective() * v));
        note_error(c, std::abs(dual_.ode_residual(z)) / scale, 1e-9);
      }
    }
  }

  void pasting(CheckResult& c) {
    const double k = dual_.kink();
    const double lo = k * (1.0 - 1e-13);
    const double hi = k * (1.0 + 1e-13);
    const double v_scale = std::max(1.0, std::abs(dual_.value(k)));
    note_error(c, std::abs(dual_.value(lo) - dual_.value(hi)) / v_scale,
               1e-8);
    const double d_scale = std::max(1.0, std::abs(dual_.derivative(k, 1)));
    note_error(
        c, std::abs(dual_.derivative(lo, 1) - dual_.derivative(hi, 1)) /
               d_scale,
        1e-8);
  }

  // Quadrature oracle for the tail integral, skipping points too close to
  // its root where a relative comparison loses meaning.
  void oracle_tail(CheckResult& c) {
    const double k = m_.stopping.kink();
    const double hi = 10.0 * (m_.boundary.j ? *m_.boundary.j : k);
    const auto integrand = [this](double y) {
      return std::pow(y, -1.0 - m_.roots.m_plus) * m_.stopping.reward(y);
    };
    const auto zs = log_grid(k / 100.0, hi, 20);
    double ref = 0;
    for (double z : zs) ref = std::max(ref, std::abs(m_.stopping.tail_integral(z)));
    for (double z : zs) {
      const auto quad = integrate_semi_infinite(integrand, z);
      if (std::abs(quad.value) < 1e-6 * ref) continue;
      note_error(c,
                 std::abs(m_.stopping.tail_integral(z) - quad.value) /
                     std::abs(quad.value),
                 1e-8);
    }
  }

  void oracle_premium(CheckResult& c) {
    const double k = m_.stopping.kink();
    const auto tail_fn = [this](double y) {
      return std::pow(y, -1.0 - m_.roots.m_plus) * m_.stopping.reward(y);
    };
    const auto lower_fn = [this](double y) {
      return std::pow(y, -1.0 - m_.roots.m_minus) * m_.stopping.reward(y);
    };
    double lower_at_bar = 0;
    std::vector<double> zs;
    if (feasible()) {
      const double z_bar = *m_.boundary.z_bar;
      lower_at_bar = integrate(lower_fn, 0.0, z_bar).value;
      zs = log_grid(z_bar * 1.01, 10.0 * *m_.boundary.j, 12);
    } else {
      zs = log_grid(k / 10.0, k * 10.0, 12);
    }
    const double scale =
        2.0 / (m_.params.theta * m_.params.theta *
               (m_.roots.m_plus - m_.roots.m_minus));
    for (double z : zs) {
      const double tail = integrate_semi_infinite(tail_fn, z).value;
      const double lower = integrate(lower_fn, 0.0, z).value;
      const double quad =
          scale * (std::pow(z, m_.roots.m_plus) * tail +
                   std::pow(z, m_.roots.m_minus) * (lower - lower_at_bar));
      const double closed = m_.stopping.premium(z, m_.boundary);
      note_error(c, std::abs(closed - quad) / std::max(1.0, std::abs(quad)),
                 1e-8);
    }
  }

  void vi_sign(CheckResult& c) {
    const double k = m_.stopping.kink();
    const auto zs = feasible()
                        ? log_grid(*m_.boundary.z_bar, 100.0 * k, 200)
                        : log_grid(k / 100.0, 100.0 * k, 200);
    for (double z : zs) {
      const double psi = m_.stopping.premium(z, m_.boundary);
      const double floor = -1e-12 * std::max(1.0, std::abs(psi));
      note_error(c, std::max(0.0, -psi) / std::max(1.0, std::abs(psi)),
                 1e-12);
      if (psi < floor) c.status = "fail";
    }
  }

  void vi_stopped(CheckResult& c) {
    if (!feasible()) {
      c.status = "skip";
      c.detail = "no stopping region in this regime";
      return;
    }
    const double z_bar = *m_.boundary.z_bar;
    for (double z : log_grid(z_bar / 100.0, z_bar, 20)) {
      note_error(c, std::abs(m_.stopping.premium(z, m_.boundary)), 0.0);
    }
  }

  void vi_fit(CheckResult& c) {
    if (!feasible()) {
      c.status = "skip";
      c.detail = "no boundary in this regime";
      return;
    }
    const double z_bar = *m_.boundary.z_bar;
    const double w_bar = *m_.boundary.w_bar;
    note_error(c, std::abs(m_.stopping.premium(z_bar, m_.boundary)) /
                      std::max(1.0, std::abs(dual_.value(z_bar))),
               1e-10);
    const double h = 1e-6;
    const double slope = (m_.stopping.premium(z_bar * (1.0 + h), m_.boundary) -
                          m_.stopping.premium(z_bar, m_.boundary)) /
                         (z_bar * h);
    note_error(c, std::abs(slope) / std::max(1.0, std::abs(w_bar)), 1e-6);
  }

  void vi_pde(CheckResult& c) {
    const double k = m_.stopping.kink();
    const double beta = m_.params.discount_effective();
    const double theta2 = m_.params.theta * m_.params.theta;
    const auto zs = feasible()
                        ? log_grid(*m_.boundary.z_bar * 1.001, 100.0 * k, 50)
                        : log_grid(k / 100.0, 100.0 * k, 50);
    for (double z : zs) {
      if (std::abs(z / k - 1.0) < 1e-9) continue;
      const double psi = m_.stopping.premium(z, m_.boundary);
      const double psi1 = m_.stopping.premium_derivative(z, m_.boundary, 1);
      const double psi2 = m_.stopping.premium_derivative(z, m_.boundary, 2);
      const double g = m_.stopping.reward(z);
      const double res = 0.5 * theta2 * z * z * psi2 +
                         (beta - m_.params.r) * z * psi1 - beta * psi + g;
      const double scale = std::max({1.0, std::abs(g), std::abs(beta * psi)});
      note_error(c, std::abs(res) / scale, 1e-9);
    }
  }

  void boundary(CheckResult& c) {
    if (!feasible()) {
      // No root: the tail integral stays positive.
      const double k = m_.stopping.kink();
      for (double z : log_grid(k / 1000.0, k * 1000.0, 100)) {
        if (!(m_.stopping.tail_integral(z) > 0.0)) {
          c.status = "fail";
          c.detail = fmt("tail integral not positive at z=%.6g", z);
          return;
        }
      }
      c.detail = "no boundary; tail integral positive everywhere";
      return;
    }
    const double z_bar = *m_.boundary.z_bar;
    const double j = *m_.boundary.j;
    note_error(c, m_.boundary.residual,
               1e-10 * std::abs(m_.stopping.tail_integral(j)));
    int flips = 0;
    double prev = m_.stopping.tail_integral(z_bar / 100.0);
    for (double z : log_grid(z_bar / 100.0, 2.0 * j, 300)) {
      const double g = m_.stopping.tail_integral(z);
      if ((g > 0) != (prev > 0)) ++flips;
      prev = g;
    }
    if (flips != 1) {
      c.status = "fail";
      c.detail = fmt("expected one sign change, saw %.0f", flips);
    }
  }

  void wealth_map(CheckResult& c) {
    const double k = m_.stopping.kink();
    const auto post_zs = log_grid(k / 100.0, k * 100.0, 50);
    double prev_w = wealth_of_dual(m_, Phase::PostRetirement, post_zs[0]);
    for (size_t i = 1; i < post_zs.size(); ++i) {
      const double w = wealth_of_dual(m_, Phase::PostRetirement, post_zs[i]);
      if (!(w < prev_w)) {
        c.status = "fail";
        c.detail = fmt("post wealth not decreasing near z=%.6g", post_zs[i]);
        return;
      }
      if (portfolio(m_, Phase::PostRetirement, post_zs[i]) < 0) {
        c.status = "fail";
        c.detail = fmt("negative post portfolio at z=%.6g", post_zs[i]);
        return;
      }
      prev_w = w;
    }
    const auto pre_zs = feasible()
                            ? log_grid(*m_.boundary.z_bar, k * 100.0, 50)
                            : log_grid(k / 100.0, k * 100.0, 50);
    prev_w = wealth_of_dual(m_, Phase::PreRetirement, pre_zs[0]);
    for (size_t i = 1; i < pre_zs.size(); ++i) {
      const double w = wealth_of_dual(m_, Phase::PreRetirement, pre_zs[i]);
      if (!(w < prev_w)) {
        c.status = "fail";
        c.detail = fmt("pre wealth not decreasing near z=%.6g", pre_zs[i]);
        return;
      }
      if (portfolio(m_, Phase::PreRetirement, pre_zs[i]) < 0) {
        c.status = "fail";
        c.detail = fmt("negative pre portfolio at z=%.6g", pre_zs[i]);
        return;
      }
      prev_w = w;
    }
  }

  void roundtrip(CheckResult& c) {
    const double k = m_.stopping.kink();
    const auto zs = feasible()
                        ? log_grid(*m_.boundary.z_bar * 1.0001, k * 50.0, 20)
                        : log_grid(k / 50.0, k * 50.0, 20);
    for (Phase phase : {Phase::PreRetirement, Phase::PostRetirement}) {
      for (double z : zs) {
        const double w = wealth_of_dual(m_, phase, z);
        const double z_back = dual_of_wealth(m_, phase, w);
        note_error(c, std::abs(z_back - z) / z, 1e-8);
      }
    }
  }

  void drift(CheckResult& c) {
    const ModelParams& p = m_.params;
    const double k = m_.stopping.kink();
    const double beta = p.discount_effective();
    const double theta2 = p.theta * p.theta;
    const auto run_phase = [&](Phase phase, const std::vector<double>& zs) {
      for (double z : zs) {
        if (std::abs(z / k - 1.0) < 0.05) continue;
        const auto d2 = [&](double zz) {
          return phase == Phase::PreRetirement ? m_.pre_derivative(zz, 2)
                                               : dual_.derivative(zz, 2);
        };
        const double v1 = phase == Phase::PreRetirement
                              ? m_.pre_derivative(z, 1)
                              : dual_.derivative(z, 1);
        const double v2 = d2(z);
        const double v3 = fd_derivative(d2, z, 1, 1e-3 * z);
        const double income =
            phase == Phase::PreRetirement ? p.y1 : p.y2;
        const double cons = consumption(p, phase, z);
        const double res = 0.5 * theta2 * z * z * v3 +
                           (beta - p.r + theta2) * z * v2 - p.r * v1 +
                           income - cons;
        const double scale =
            std::max({1.0, std::abs(p.r * v1), std::abs(income - cons)});
        note_error(c, std::abs(res) / scale, 1e-4);
      }
    };
    run_phase(Phase::PostRetirement, log_grid(k / 100.0, k * 100.0, 20));
    run_phase(Phase::PreRetirement,
              feasible() ? log_grid(*m_.boundary.z_bar * 1.05, k * 100.0, 20)
                         : log_grid(k / 100.0, k * 100.0, 20));
  }

  void martingale(CheckResult& c) {
    const auto checks = martingale_check(m_, 1.0, opt_.seed, opt_.mc_paths,
                                         {1.0, 5.0, 25.0}, opt_.workers);
    for (const auto& chk : checks) {
      const double tol = 3.0 * chk.std_error;
      note_error(c, std::abs(chk.estimate - chk.target), tol);
      if (!chk.pass) c.status = "fail";
    }
    c.detail = fmt("n=%.0f paths, t up to %.0f",
                   static_cast<double>(opt_.mc_paths), 25.0);
  }

  void budget_pre(CheckResult& c) {
    SimConfig cfg;
    cfg.n_paths = opt_.mc_paths;
    cfg.horizon_years = 40.0;
    cfg.dt = 1.0 / 26.0;
    cfg.master_seed = opt_.seed + 1;
    cfg.phase = Phase::PreRetirement;
    cfg.z0 = feasible()
                 ? std::sqrt(*m_.boundary.z_bar * *m_.boundary.j)
                 : m_.stopping.kink() / 2.0;
    const BudgetReport rep = budget_check(m_, cfg, opt_.workers);
    note_error(c, std::abs(rep.estimate - rep.target),
               3.0 * rep.std_error + rep.tail_bound);
    c.detail = fmt("estimate %.6g vs target %.6g, stopped %.0f paths",
                   rep.estimate, rep.target,
                   static_cast<double>(rep.paths_stopped));
  }

  void budget_post(CheckResult& c) {
    SimConfig cfg;
    cfg.n_paths = opt_.mc_paths;
    cfg.horizon_years = 120.0;
    cfg.dt = 1.0 / 12.0;
    cfg.master_seed = opt_.seed + 2;
    cfg.phase = Phase::PostRetirement;
    cfg.z0 = m_.stopping.kink() / 2.0;
    const BudgetReport rep = budget_check(m_, cfg, opt_.workers);
    note_error(c, std::abs(rep.estimate - rep.target),
               3.0 * rep.std_error + rep.tail_bound);
    c.detail = fmt("estimate %.6g vs target %.6g, tail bound %.3g",
                   rep.estimate, rep.target, rep.tail_bound);
  }

  void determinism(CheckResult& c) {
    SimConfig cfg;
    cfg.n_paths = 500;
    cfg.horizon_years = 5.0;
    cfg.dt = 1.0 / 52.0;
    cfg.master_seed = opt_.seed + 3;
    cfg.phase = Phase::PostRetirement;
    cfg.z0 = m_.stopping.kink() / 2.0;
    const BudgetReport one = budget_check(m_, cfg, 1);
    const BudgetReport four = budget_check(m_, cfg, 4);
    if (one.estimate != four.estimate || one.std_error != four.std_error) {
      c.status = "fail";
      c.detail = "estimates differ across worker counts";
      return;
    }
    c.detail = "bitwise identical across 1 and 4 workers";
  }

  void hitting(CheckResult& c) {
    if (!feasible()) {
      c.status = "skip";
      c.detail = "no threshold in this regime";
      return;
    }
    SimConfig cfg;
    cfg.n_paths = 2000;
    cfg.horizon_years = 30.0;
    cfg.master_seed = opt_.seed + 4;
    cfg.phase = Phase::PreRetirement;
    cfg.z0 = 2.0 * *m_.boundary.z_bar;
    cfg.dt = 1.0 / 26.0;
    const BudgetReport coarse = budget_check(m_, cfg, opt_.workers);
    cfg.dt = 1.0 / 52.0;
    const BudgetReport fine = budget_check(m_, cfg, opt_.workers);
    c.detail = fmt("hit fraction %.4f at dt=1/26 vs %.4f at dt=1/52",
                   static_cast<double>(coarse.paths_stopped) / cfg.n_paths,
                   static_cast<double>(fine.paths_stopped) / cfg.n_paths);
  }

  const SolvedModel& m_;
  const PostRetirementDual& dual_;
  VerifyOptions opt_;
  std::vector<CheckResult> results_;
};

}  // namespace

std::vector<CheckResult> run_verification(const SolvedModel& m,
                                          const VerifyOptions& opt) {
  return Battery(m, m.dual, opt).run();
}

std::vector<CheckResult> run_verification_with_dual(
    const SolvedModel& m, const PostRetirementDual& dual,
    const VerifyOptions& opt) {
  return Battery(m, dual, opt).run();
}

bool all_passed(const std::vector<CheckResult>& checks) {
  for (const auto& c : checks) {
    if (c.status == "fail") return false;
  }
  return true;
}

}  // namespace retsolve
