#include "retsolve/params.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace retsolve {

namespace {

std::string describe(const char* field, const char* what, double got) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%s %s (got %g)", field, what, got);
  return buf;
}

double require_field(const std::optional<double>& v, const char* name) {
  if (!v) {
    throw ValidationError(ValidationError::Code::MissingField, name,
                          std::string(name) + " is required");
  }
  if (!std::isfinite(*v)) {
    throw ValidationError(ValidationError::Code::BadValue, name,
                          describe(name, "must be finite", *v));
  }
  return *v;
}

void require_positive_rate(double v, const char* name) {
  if (v <= 0) {
    throw ValidationError(ValidationError::Code::NonPositiveRate, name,
                          describe(name, "must be positive", v));
  }
}

}  // namespace

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::DelayForever: return "DelayForever";
    case Regime::KnifeEdge: return "KnifeEdge";
    case Regime::RetirementFeasible: return "RetirementFeasible";
  }
  return "Unknown";
}

double market_price_of_risk(double mu, double r, double sigma) {
  return (mu - r) / sigma;
}

double merton_constant(double r, double rho, double gamma, double theta) {
  return r + (rho - r) / gamma +
         (gamma - 1.0) / (2.0 * gamma * gamma) * theta * theta;
}

double support_level_from_subsidy(double merton_k, double r, double delta,
                                  double subsidy) {
  return merton_k * (r + delta) / r * subsidy;
}

ModelParams ModelParams::validate(const RawParams& raw) {
  ModelParams p{};
  p.r = require_field(raw.r, "r");
  p.mu = require_field(raw.mu, "mu");
  p.sigma = require_field(raw.sigma, "sigma");
  p.rho = require_field(raw.rho, "rho");
  p.gamma = require_field(raw.gamma, "gamma");
  p.delta = require_field(raw.delta, "delta");
  p.y1 = require_field(raw.y1, "y1");
  p.y2 = require_field(raw.y2, "y2");

  require_positive_rate(p.r, "r");
  require_positive_rate(p.sigma, "sigma");
  require_positive_rate(p.rho, "rho");
  require_positive_rate(p.delta, "delta");

  if (p.mu <= p.r) {
    throw ValidationError(ValidationError::Code::MuNotAboveR, "mu",
                          describe("mu", "must exceed r", p.mu));
  }
  if (p.gamma <= 0) {
    throw ValidationError(ValidationError::Code::BadValue, "gamma",
                          describe("gamma", "must be positive", p.gamma));
  }
  if (std::abs(p.gamma - 1.0) < 1e-12) {
    throw ValidationError(ValidationError::Code::GammaIsOne, "gamma",
                          "gamma = 1 (log utility) is not supported");
  }
  if (p.y1 <= 0) {
    throw ValidationError(ValidationError::Code::BadValue, "y1",
                          describe("y1", "must be positive", p.y1));
  }
  if (p.y2 < 0) {
    throw ValidationError(ValidationError::Code::BadValue, "y2",
                          describe("y2", "must be nonnegative", p.y2));
  }
  if (p.y2 >= p.y1) {
    throw ValidationError(ValidationError::Code::IncomeOrder, "y2",
                          describe("y2", "must be below y1", p.y2));
  }

  if (!std::isfinite(raw.regime_tol) || raw.regime_tol <= 0) {
    throw ValidationError(ValidationError::Code::BadValue, "regime_tol",
                          describe("regime_tol", "must be positive",
                                   raw.regime_tol));
  }
  p.regime_tol = raw.regime_tol;

  const bool has_i = raw.support_i.has_value();
  const bool has_l = raw.support_l.has_value();
  if (has_i == has_l) {
    throw ValidationError(
        ValidationError::Code::BothOrNeitherSupportGiven, "support",
        "exactly one of support.I and support.L must be given");
  }

  p.theta = market_price_of_risk(p.mu, p.r, p.sigma);
  p.merton_k = merton_constant(p.r, p.rho, p.gamma, p.theta);
  if (p.merton_k <= 0) {
    throw ValidationError(ValidationError::Code::NonPositiveMertonK, "gamma",
                          describe("Merton constant K", "must be positive",
                                   p.merton_k));
  }
  if (raw.tie_delta_to_k) {
    p.delta = p.merton_k;
    p.delta_tied = true;
  } else {
    p.delta_tied = std::abs(p.delta - p.merton_k) <= p.regime_tol;
  }

  if (has_i) {
    const double subsidy = require_field(raw.support_i, "support.I");
    if (subsidy <= 0 || subsidy >= p.y1) {
      throw ValidationError(ValidationError::Code::BadValue, "support.I",
                            describe("support.I", "must be in (0, y1)",
                                     subsidy));
    }
    p.support_i = subsidy;
    p.support_l = support_level_from_subsidy(p.merton_k, p.r, p.delta, subsidy);
  } else {
    const double level = require_field(raw.support_l, "support.L");
    if (level <= 0) {
      throw ValidationError(ValidationError::Code::BadValue, "support.L",
                            describe("support.L", "must be positive", level));
    }
    p.support_l = level;
  }

  return p;
}

double characteristic_quadratic(const ModelParams& p, double m) {
  const double half_theta2 = 0.5 * p.theta * p.theta;
  const double beta = p.discount_effective();
  return half_theta2 * m * m + (beta - p.r - half_theta2) * m - beta;
}

DualRoots dual_roots(const ModelParams& p) {
  const double a = 0.5 * p.theta * p.theta;
  const double b = p.discount_effective() - p.r - a;
  const double c = -p.discount_effective();
  // b^2 - 4ac with c < 0, so the discriminant is strictly positive.
  const double disc = b * b - 4.0 * a * c;
  const double sq = std::sqrt(disc);
  // Citardauq-stable split: avoid cancellation between -b and sq.
  const double q = -0.5 * (b + std::copysign(sq, b));
  double r1, r2;
  if (q != 0.0) {
    r1 = q / a;
    r2 = c / q;
  } else {
    r1 = sq / (2.0 * a);
    r2 = -r1;
  }
  DualRoots roots{};
  roots.m_plus = std::max(r1, r2);
  roots.m_minus = std::min(r1, r2);
  return roots;
}

Regime classify_regime(const ModelParams& p) {
  const double gap = p.income_gap();
  const double scale = std::max({1.0, std::abs(gap), p.support_l});
  if (std::abs(p.support_l - gap) <= p.regime_tol * scale) {
    return Regime::KnifeEdge;
  }
  return p.support_l < gap ? Regime::DelayForever : Regime::RetirementFeasible;
}

}  // namespace retsolve
