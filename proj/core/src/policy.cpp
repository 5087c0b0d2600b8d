#include "retsolve/policy.hpp"

#include <cmath>

#include "retsolve/numerics.hpp"

namespace retsolve {

namespace {

void check_positive_z(double z) {
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw NumericError(NumericError::Code::NonPositiveZ,
                       "dual variable must be positive and finite");
  }
}

}  // namespace

const char* to_string(Phase phase) {
  return phase == Phase::PreRetirement ? "pre" : "post";
}

double consumption(const ModelParams& p, Phase phase, double z) {
  check_positive_z(z);
  const double base = std::pow(z, -1.0 / p.gamma);
  if (phase == Phase::PreRetirement) return base;
  return std::max(base - p.support_l, 0.0);
}

double wealth_of_dual(const SolvedModel& m, Phase phase, double z) {
  check_positive_z(z);
  if (phase == Phase::PostRetirement) return -m.dual.derivative(z, 1);
  if (m.boundary.z_bar) {
    const double z_bar = *m.boundary.z_bar;
    if (z < z_bar * (1.0 - 1e-12)) {
      throw NumericError(NumericError::Code::OutOfRegion,
                         "pre-retirement states live at z >= z_bar");
    }
    if (z < z_bar) z = z_bar;
  }
  return -m.pre_derivative(z, 1);
}

double portfolio(const SolvedModel& m, Phase phase, double z) {
  check_positive_z(z);
  const double lever = m.params.theta / m.params.sigma;
  if (phase == Phase::PostRetirement) {
    return lever * z * m.dual.derivative(z, 2);
  }
  if (m.boundary.z_bar && z < *m.boundary.z_bar * (1.0 - 1e-12)) {
    throw NumericError(NumericError::Code::OutOfRegion,
                       "pre-retirement states live at z >= z_bar");
  }
  return lever * z * m.pre_derivative(z, 2);
}

double dual_of_wealth(const SolvedModel& m, Phase phase, double w) {
  if (!std::isfinite(w)) {
    throw NumericError(NumericError::Code::WealthOutOfRange,
                       "wealth must be finite");
  }
  const bool pre = phase == Phase::PreRetirement;
  // Wealth is decreasing in z; its infimum is the annuitized income floor.
  const double income = pre ? m.params.y1 : m.params.y2;
  if (w <= -income / m.params.r) {
    throw NumericError(NumericError::Code::WealthOutOfRange,
                       "wealth is below the annuitized income floor");
  }

  double lo;
  if (pre && m.boundary.z_bar) {
    const double w_bar = *m.boundary.w_bar;
    if (w > w_bar) {
      throw NumericError(NumericError::Code::WealthOutOfRange,
                         "wealth is above the retirement threshold wealth");
    }
    if (w == w_bar) return *m.boundary.z_bar;
    lo = *m.boundary.z_bar;
  } else {
    lo = 1.0;
    for (int i = 0; i < 900 && wealth_of_dual(m, phase, lo) < w; ++i) {
      lo *= 0.5;
    }
  }

  double hi = std::max(lo, 1.0);
  int tries = 0;
  while (wealth_of_dual(m, phase, hi) > w && tries < 900) {
    hi *= 2.0;
    ++tries;
  }
  if (wealth_of_dual(m, phase, hi) > w) {
    throw NumericError(NumericError::Code::WealthOutOfRange,
                       "could not bracket the requested wealth");
  }

  const auto gap = [&](double z) { return wealth_of_dual(m, phase, z) - w; };
  RootOptions opt;
  opt.rtol = 1e-12;
  return find_root(gap, make_bracket(gap, lo, hi), opt);
}

std::vector<PolicyPoint> policy_table(const SolvedModel& m,
                                      const GridSpec& grid) {
  if (!(grid.z_min > 0) || !(grid.z_max > grid.z_min) || grid.n < 2) {
    throw ValidationError(ValidationError::Code::BadValue, "grid",
                          "grid needs 0 < z_min < z_max and n >= 2");
  }

  std::vector<double> zs(static_cast<size_t>(grid.n));
  const double ratio = std::log(grid.z_max / grid.z_min);
  for (int i = 0; i < grid.n; ++i) {
    zs[static_cast<size_t>(i)] =
        grid.z_min * std::exp(ratio * i / (grid.n - 1));
  }

  std::vector<PolicyPoint> rows;
  const auto emit = [&](double z, Phase phase, bool is_threshold) {
    PolicyPoint pt;
    pt.z = z;
    pt.phase = phase;
    pt.is_threshold = is_threshold;
    pt.wealth = wealth_of_dual(m, phase, z);
    pt.consumption = consumption(m.params, phase, z);
    pt.portfolio = portfolio(m, phase, z);
    rows.push_back(pt);
  };

  if (m.boundary.z_bar) {
    const double z_bar = *m.boundary.z_bar;
    emit(z_bar, Phase::PreRetirement, true);
    for (double z : zs) {
      if (z > z_bar) emit(z, Phase::PreRetirement, false);
    }
    for (double z : zs) emit(z, Phase::PostRetirement, false);
  } else {
    for (double z : zs) emit(z, Phase::PreRetirement, false);
  }
  return rows;
}

}  // namespace retsolve
