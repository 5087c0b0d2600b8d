// Model parameters, derived market constants, and regime classification.
//
// The model: an agent earns y1 while working. An income disaster arrives at
// an exponential time with intensity delta and cuts labor income to y2 < y1
// for good. Retiring voluntarily (stopping) instead locks in a government
// support flow worth a perpetual consumption floor L. Consumption c_t and a
// risky-asset position run alongside in a Black-Scholes market (r, mu,
// sigma), utility is CRRA with relative risk aversion gamma, discount rate
// rho. Everything downstream is solved in the convex-dual variable z
// (a multiple of the state-price density), where closed forms exist.
#pragma once

#include <cmath>
#include <optional>

#include "retsolve/errors.hpp"

namespace retsolve {

enum class Regime {
  DelayForever,        // support too small, stopping never optimal: L < y1 - y2
  KnifeEdge,           // boundary case L = y1 - y2 (within tolerance)
  RetirementFeasible,  // L > y1 - y2, finite threshold z_bar exists
};

const char* to_string(Regime regime);

// Parameter record as read from a config document, before validation.
// support_i and support_l are the two mutually exclusive ways to specify
// the support program: principal I or resolved consumption floor L.
struct RawParams {
  std::optional<double> r, mu, sigma, rho, gamma, delta, y1, y2;
  std::optional<double> support_i, support_l;
  double regime_tol = 1e-10;
  bool tie_delta_to_k = false;
};

// theta = (mu - r) / sigma
double market_price_of_risk(double mu, double r, double sigma);

// K = r + (rho - r)/gamma + (gamma - 1)/(2 gamma^2) * theta^2, the Merton
// consumption rate at discount rho. Must be positive for finite values.
double merton_constant(double r, double rho, double gamma, double theta);

// L = merton_k * (r + delta)/r * subsidy: the consumption floor funded by a
// support principal I, valued at the pre-disaster effective discount r+delta.
double support_level_from_subsidy(double merton_k, double r, double delta,
                                  double subsidy);

// Validated parameters with cached derived constants.
struct ModelParams {
  double r, mu, sigma, rho, gamma, delta, y1, y2;
  double support_l;                 // consumption floor L granted on retiring
  std::optional<double> support_i;  // principal, when the config gave I
  double theta;                     // market price of risk
  double merton_k;                  // Merton rate at discount rho
  double regime_tol = 1e-10;
  bool delta_tied = false;          // delta equals merton_k (forced or given)

  // Throws ValidationError on any constraint violation.
  static ModelParams validate(const RawParams& raw);

  // Merton rate of the rho+delta-discounted problem: K + delta/gamma.
  // This is the rate that prices consumption before the disaster resolves.
  double merton_k_effective() const { return merton_k + delta / gamma; }

  double discount_effective() const { return rho + delta; }
  double income_gap() const { return y1 - y2; }

  // Dual location of the consumption floor: c = z^(-1/gamma) meets L.
  double kink() const { return std::pow(support_l, -gamma); }
};

// Roots of the characteristic quadratic
//   Q(m) = theta^2/2 m^2 + (rho + delta - r - theta^2/2) m - (rho + delta),
// with m_plus > 1 and m_minus < min(0, 1 - 1/gamma) for valid parameters.
struct DualRoots {
  double m_plus;
  double m_minus;
};

double characteristic_quadratic(const ModelParams& p, double m);
DualRoots dual_roots(const ModelParams& p);

Regime classify_regime(const ModelParams& p);

}  // namespace retsolve
