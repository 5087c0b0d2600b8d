#include "retsolve/free_boundary.hpp"

#include <cmath>
#include <stdexcept>

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

StoppingProblem::StoppingProblem(const ModelParams& p, const DualRoots& roots) {
  cb_ = p.y1 - p.y2 - p.support_l;
  cu_ = p.gamma / (1.0 - p.gamma);
  cg_ = p.y1 - p.y2;
  cc_ = -std::pow(p.support_l, 1.0 - p.gamma) / (1.0 - p.gamma);
  kink_ = p.kink();
  x_ = (p.gamma - 1.0) / p.gamma;
  m_plus_ = roots.m_plus;
  m_minus_ = roots.m_minus;
  delta_m_ = m_plus_ - m_minus_;
  theta2_ = p.theta * p.theta;
  gamma_ = p.gamma;
  regime_ = classify_regime(p);

  const double k = kink_;
  tail_at_kink_ = cu_ * std::pow(k, x_ - m_plus_) / (m_plus_ - x_) +
                  cg_ * std::pow(k, 1.0 - m_plus_) / (m_plus_ - 1.0) +
                  cc_ * std::pow(k, -m_plus_) / m_plus_;
  lower_at_kink_ = cb_ * std::pow(k, 1.0 - m_minus_) / (1.0 - m_minus_);
}

double StoppingProblem::reward(double z) const {
  check_positive_z(z);
  if (z < kink_) return cb_ * z;
  return cu_ * std::pow(z, x_) + cg_ * z + cc_;
}

double StoppingProblem::reward_derivative(double z) const {
  check_positive_z(z);
  if (z < kink_) return cb_;
  // d/dz of cu z^x is -z^(-1/gamma) since cu * x = -1.
  return -std::pow(z, -1.0 / gamma_) + cg_;
}

double StoppingProblem::tail_integral(double z) const {
  check_positive_z(z);
  if (z < kink_) {
    return tail_at_kink_ +
           cb_ * (std::pow(kink_, 1.0 - m_plus_) -
                  std::pow(z, 1.0 - m_plus_)) /
               (1.0 - m_plus_);
  }
  return cu_ * std::pow(z, x_ - m_plus_) / (m_plus_ - x_) +
         cg_ * std::pow(z, 1.0 - m_plus_) / (m_plus_ - 1.0) +
         cc_ * std::pow(z, -m_plus_) / m_plus_;
}

double StoppingProblem::lower_integral(double z) const {
  check_positive_z(z);
  if (z <= kink_) {
    return cb_ * std::pow(z, 1.0 - m_minus_) / (1.0 - m_minus_);
  }
  return lower_at_kink_ +
         cu_ * (std::pow(z, x_ - m_minus_) - std::pow(kink_, x_ - m_minus_)) /
             (x_ - m_minus_) +
         cg_ * (std::pow(z, 1.0 - m_minus_) -
                std::pow(kink_, 1.0 - m_minus_)) /
             (1.0 - m_minus_) +
         cc_ * (std::pow(z, -m_minus_) - std::pow(kink_, -m_minus_)) /
             (-m_minus_);
}

double StoppingProblem::find_j() const {
  if (regime_ != Regime::RetirementFeasible) {
    throw NumericError(NumericError::Code::WrongRegime,
                       "the reward has no positive root unless L > y1 - y2");
  }
  // g(kink) = cb * kink < 0 here; g is convex above the kink and grows
  // linearly, so doubling finds the far side.
  double hi = kink_;
  int tries = 0;
  while (reward(hi) <= 0.0 && tries < 400) {
    hi *= 2.0;
    ++tries;
  }
  if (reward(hi) <= 0.0) {
    throw NumericError(NumericError::Code::BracketingFailed,
                       "could not bracket the reward root");
  }
  RootOptions opt;
  opt.rtol = 1e-13;
  const auto g = [this](double z) { return reward(z); };
  return find_root(g, make_bracket(g, kink_, hi), opt);
}

FreeBoundarySolution StoppingProblem::solve(
    const PostRetirementDual& dual) const {
  FreeBoundarySolution fb;
  fb.regime = regime_;
  if (regime_ != Regime::RetirementFeasible) return fb;

  fb.j = find_j();

  // G -> -inf as z -> 0 and G(j) > 0; walk the lower end down until the
  // sign flips.
  double eps = kink_ / 10.0;
  int tries = 0;
  while (tail_integral(eps) >= 0.0 && tries < 12) {
    eps /= 10.0;
    ++tries;
  }
  if (tail_integral(eps) >= 0.0) {
    throw NumericError(NumericError::Code::BracketingFailed,
                       "could not bracket the threshold");
  }

  RootOptions opt;
  opt.rtol = 1e-13;
  const auto g_fn = [this](double z) { return tail_integral(z); };
  const double z_bar = find_root(g_fn, make_bracket(g_fn, eps, *fb.j), opt);
  fb.z_bar = z_bar;
  fb.residual = std::abs(tail_integral(z_bar));
  fb.g_minus_at_z_bar = lower_integral(z_bar);
  fb.w_bar = -dual.derivative(z_bar, 1);
  return fb;
}

double StoppingProblem::premium(double z, const FreeBoundarySolution& fb) const {
  check_positive_z(z);
  if (fb.z_bar && z <= *fb.z_bar) return 0.0;
  const double scale = 2.0 / (theta2_ * delta_m_);
  return scale * (std::pow(z, m_plus_) * tail_integral(z) +
                  std::pow(z, m_minus_) *
                      (lower_integral(z) - fb.g_minus_at_z_bar));
}

double StoppingProblem::premium_derivative(double z,
                                           const FreeBoundarySolution& fb,
                                           int order) const {
  check_positive_z(z);
  if (order != 1 && order != 2) {
    throw std::invalid_argument("premium derivative order must be 1 or 2");
  }
  if (fb.z_bar && z < *fb.z_bar) return 0.0;
  const double scale = 2.0 / (theta2_ * delta_m_);
  const double tail = tail_integral(z);
  const double lower = lower_integral(z) - fb.g_minus_at_z_bar;
  if (order == 1) {
    // The G' and G_minus' terms cancel exactly against each other.
    return scale * (m_plus_ * std::pow(z, m_plus_ - 1.0) * tail +
                    m_minus_ * std::pow(z, m_minus_ - 1.0) * lower);
  }
  return scale * (m_plus_ * (m_plus_ - 1.0) * std::pow(z, m_plus_ - 2.0) *
                      tail +
                  m_minus_ * (m_minus_ - 1.0) * std::pow(z, m_minus_ - 2.0) *
                      lower) -
         (2.0 / theta2_) * reward(z) / (z * z);
}

double SolvedModel::pre_value(double z) const {
  return dual.value(z) + stopping.premium(z, boundary);
}

double SolvedModel::pre_derivative(double z, int order) const {
  return dual.derivative(z, order) +
         stopping.premium_derivative(z, boundary, order);
}

SolvedModel solve_model(const ModelParams& p) {
  const DualRoots roots = dual_roots(p);
  PostRetirementDual dual = PostRetirementDual::build(p, roots);
  StoppingProblem stopping(p, roots);
  FreeBoundarySolution boundary = stopping.solve(dual);
  return SolvedModel{p, roots, std::move(dual), std::move(stopping),
                     std::move(boundary)};
}

}  // namespace retsolve
