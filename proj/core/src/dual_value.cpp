#include "retsolve/dual_value.hpp"

#include <cmath>
#include <stdexcept>

namespace retsolve {

namespace {

void check_denominator(double v, const char* what) {
  if (std::abs(v) < 1e-14) {
    throw NumericError(NumericError::Code::DegenerateDenominator, what);
  }
}

void check_positive_z(double z) {
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw NumericError(NumericError::Code::NonPositiveZ,
                       "dual variable must be positive and finite");
  }
}

}  // namespace

PostRetirementDual PostRetirementDual::build(const ModelParams& p,
                                             const DualRoots& roots) {
  PostRetirementDual d;
  d.m_plus_ = roots.m_plus;
  d.m_minus_ = roots.m_minus;
  d.kink_ = p.kink();
  d.x_ = (p.gamma - 1.0) / p.gamma;
  d.theta2_ = p.theta * p.theta;
  d.beta_ = p.discount_effective();
  d.r_ = p.r;
  d.gamma_ = p.gamma;
  d.support_l_ = p.support_l;
  d.y2_ = p.y2;

  const double one_minus_gamma = 1.0 - p.gamma;
  const double k_eff = p.merton_k_effective();
  check_denominator(one_minus_gamma, "1 - gamma");
  check_denominator(k_eff, "effective Merton constant");
  check_denominator(p.r, "r");
  check_denominator(d.beta_, "rho + delta");

  d.m_coef_ = p.gamma / (one_minus_gamma * k_eff);
  d.lin1_ = (p.y2 + p.support_l) / p.r;
  d.lin2_ = p.y2 / p.r;
  d.const2_ = std::pow(p.support_l, one_minus_gamma) /
              (one_minus_gamma * d.beta_);

  // C1 pasting at the kink: match value and slope of the two branches.
  //   A k^(m+) - B k^(m-)               = R0
  //   A m+ k^(m+-1) - B m- k^(m--1)     = R1 / k * k  (written below at k)
  const double k = d.kink_;
  const double r0 = d.const2_ - d.m_coef_ * std::pow(k, d.x_) -
                    (p.support_l / p.r) * k;
  const double r1 = -d.m_coef_ * d.x_ * std::pow(k, d.x_ - 1.0) -
                    p.support_l / p.r;
  const double delta_m = d.m_plus_ - d.m_minus_;
  check_denominator(delta_m, "m+ - m-");
  d.a_ = (r1 * k - d.m_minus_ * r0) / (delta_m * std::pow(k, d.m_plus_));
  d.b_ = (r1 * k - d.m_plus_ * r0) / (delta_m * std::pow(k, d.m_minus_));

  if (!(d.a_ < 0.0) || !(d.b_ > 0.0)) {
    throw std::logic_error("dual value coefficients have the wrong sign");
  }
  return d;
}

double PostRetirementDual::value(double z) const {
  check_positive_z(z);
  if (z < kink_) {
    return a_ * std::pow(z, m_plus_) + m_coef_ * std::pow(z, x_) + lin1_ * z;
  }
  return b_ * std::pow(z, m_minus_) + lin2_ * z + const2_;
}

double PostRetirementDual::derivative(double z, int order) const {
  check_positive_z(z);
  if (order != 1 && order != 2) {
    throw std::invalid_argument("derivative order must be 1 or 2");
  }
  if (order == 2 && std::abs(z - kink_) <= 1e-12 * kink_) {
    z = z < kink_ ? kink_ * (1.0 - 1e-12) : kink_ * (1.0 + 1e-12);
  }
  if (z < kink_) {
    if (order == 1) {
      return a_ * m_plus_ * std::pow(z, m_plus_ - 1.0) +
             m_coef_ * x_ * std::pow(z, x_ - 1.0) + lin1_;
    }
    return a_ * m_plus_ * (m_plus_ - 1.0) * std::pow(z, m_plus_ - 2.0) +
           m_coef_ * x_ * (x_ - 1.0) * std::pow(z, x_ - 2.0);
  }
  if (order == 1) {
    return b_ * m_minus_ * std::pow(z, m_minus_ - 1.0) + lin2_;
  }
  return b_ * m_minus_ * (m_minus_ - 1.0) * std::pow(z, m_minus_ - 2.0);
}

double PostRetirementDual::dual_flow(double z) const {
  if (z < kink_) {
    return gamma_ / (1.0 - gamma_) * std::pow(z, x_) +
           (support_l_ + y2_) * z;
  }
  return beta_ * const2_ + y2_ * z;
}

double PostRetirementDual::ode_residual(double z) const {
  check_positive_z(z);
  const double v = value(z);
  const double v1 = derivative(z, 1);
  const double v2 = derivative(z, 2);
  return 0.5 * theta2_ * z * z * v2 + (beta_ - r_) * z * v1 - beta_ * v +
         dual_flow(z);
}

PostRetirementDual PostRetirementDual::perturbed(double a_scale,
                                                 double b_scale) const {
  PostRetirementDual d = *this;
  d.a_ *= a_scale;
  d.b_ *= b_scale;
  return d;
}

}  // namespace retsolve
