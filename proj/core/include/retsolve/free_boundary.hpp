// The retirement stopping problem in the dual variable.
//
// Working on costs the flow g(z) = f_work(z) - f_retired(z), the dual-flow
// gap between the working and retired problems:
//
//   z <  kink:  g(z) = (y1 - y2 - L) z
//   z >= kink:  g(z) = gamma/(1-gamma) z^((gamma-1)/gamma) + (y1 - y2) z
//               - L^(1-gamma)/(1-gamma)
//
// When L > y1 - y2 the reward g is negative on (0, j) and positive above
// j, its unique positive root. The value of the option to keep working,
//
//   premium(z) = sup over stopping times of E int_0^tau e^-(rho+delta)t
//                g(z_t) dt  >=  0,
//
// is available in closed form from the two integrals
//
//   G(z)       = int_z^inf y^(-1-m+) g(y) dy   (tail_integral)
//   G_minus(z) = int_0^z   y^(-1-m-) g(y) dy   (lower_integral),
//
// and the retirement threshold z_bar is the unique root of G below j.
// The working agent's dual value is then dual.value(z) + premium(z).
#pragma once

#include <optional>

#include "retsolve/dual_value.hpp"
#include "retsolve/params.hpp"

namespace retsolve {

struct FreeBoundarySolution {
  Regime regime = Regime::DelayForever;
  std::optional<double> j;      // root of the reward g
  std::optional<double> z_bar;  // retirement threshold in the dual variable
  std::optional<double> w_bar;  // threshold wealth, -dual.value'(z_bar)
  double residual = 0;          // |G(z_bar)| achieved by the root find
  double g_minus_at_z_bar = 0;  // lower_integral(z_bar); 0 when no boundary
};

class StoppingProblem {
public:
  StoppingProblem(const ModelParams& p, const DualRoots& roots);

  Regime regime() const { return regime_; }
  double kink() const { return kink_; }

  double reward(double z) const;
  double reward_derivative(double z) const;

  // Closed-form power-sum antiderivatives of the two integrals above.
  double tail_integral(double z) const;
  double lower_integral(double z) const;

  // Root of the reward; only defined in the RetirementFeasible regime.
  double find_j() const;

  // Locates z_bar (when the regime admits one) and packages the boundary.
  FreeBoundarySolution solve(const PostRetirementDual& dual) const;

  // Value of the option to keep working. Zero at and below z_bar. In
  // regimes without a boundary the same formula applies with the
  // G_minus(z_bar) term absent.
  double premium(double z, const FreeBoundarySolution& fb) const;

  // Analytic derivative of the premium, order 1 or 2; one-sided (from the
  // right) at z_bar itself, zero below.
  double premium_derivative(double z, const FreeBoundarySolution& fb,
                            int order) const;

private:
  double cb_ = 0;  // y1 - y2 - L
  double cu_ = 0;  // gamma/(1-gamma)
  double cg_ = 0;  // y1 - y2
  double cc_ = 0;  // -L^(1-gamma)/(1-gamma)
  double kink_ = 0;
  double x_ = 0;
  double m_plus_ = 0, m_minus_ = 0;
  double delta_m_ = 0;
  double theta2_ = 0;
  double gamma_ = 0;
  Regime regime_ = Regime::DelayForever;
  double tail_at_kink_ = 0;
  double lower_at_kink_ = 0;
};

struct SolvedModel {
  ModelParams params;
  DualRoots roots;
  PostRetirementDual dual;
  StoppingProblem stopping;
  FreeBoundarySolution boundary;

  // Dual value of the working agent: dual.value(z) + premium(z).
  double pre_value(double z) const;
  double pre_derivative(double z, int order) const;
};

SolvedModel solve_model(const ModelParams& p);

}  // namespace retsolve
