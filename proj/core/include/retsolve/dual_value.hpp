// Closed-form dual value of the retired agent.
//
// After retiring, the agent consumes c >= 0 on top of the support floor L
// and receives income y2. In the dual variable the value function solves
//
//   theta^2/2 z^2 v'' + (rho + delta - r) z v' - (rho + delta) v + f(z) = 0,
//
// where f is the dual flow sup_c [u(c + L) - c z] + y2 z. The flow has a
// kink at z = L^(-gamma): below it the floor is not binding, above it
// market consumption is zero. The solution is a power sum on each side,
//
//   z <  kink:  A z^(m+) + gamma/((1-gamma) K_eff) z^((gamma-1)/gamma)
//               + (y2 + L)/r z
//   z >= kink:  B z^(m-) + y2/r z + L^(1-gamma)/((1-gamma)(rho+delta))
//
// with A < 0 and B > 0 pinned by C1 pasting at the kink. K_eff is
// merton_k_effective() = K + delta/gamma.
#pragma once

#include "retsolve/params.hpp"

namespace retsolve {

class PostRetirementDual {
public:
  static PostRetirementDual build(const ModelParams& p, const DualRoots& roots);

  double value(double z) const;

  // Analytic derivative, order 1 or 2. The first derivative is continuous
  // across the kink by construction; for order 2 an argument within a
  // relative 1e-12 of the kink is nudged to the nearer side before
  // evaluation.
  double derivative(double z, int order) const;

  // Left-hand side of the ODE above, evaluated with the analytic
  // derivatives; zero up to roundoff for a correct build.
  double ode_residual(double z) const;

  double a_coefficient() const { return a_; }
  double b_coefficient() const { return b_; }
  double kink() const { return kink_; }

  // Value of the z -> infinity limit, L^(1-gamma)/((1-gamma)(rho+delta)).
  double limit_at_infinity() const { return const2_; }

  // Copy with scaled homogeneous coefficients. Fault-injection hook used by
  // tests to confirm the verification suite catches a wrong solution.
  PostRetirementDual perturbed(double a_scale, double b_scale) const;

private:
  PostRetirementDual() = default;

  double dual_flow(double z) const;

  double m_plus_ = 0, m_minus_ = 0;
  double a_ = 0, b_ = 0;
  double kink_ = 0;
  double x_ = 0;        // (gamma - 1)/gamma
  double m_coef_ = 0;   // gamma/((1-gamma) K_eff)
  double lin1_ = 0;     // (y2 + L)/r
  double lin2_ = 0;     // y2/r
  double const2_ = 0;   // L^(1-gamma)/((1-gamma)(rho+delta))
  double theta2_ = 0;
  double beta_ = 0;     // rho + delta
  double r_ = 0;
  double gamma_ = 0;
  double support_l_ = 0;
  double y2_ = 0;
};

}  // namespace retsolve
