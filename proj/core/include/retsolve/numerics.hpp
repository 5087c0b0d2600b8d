// Bracketed root finding, adaptive Gauss-Kronrod quadrature, and finite
// differences. These double as the independent oracle side of the
// closed-form-vs-quadrature consistency checks, so they deliberately share
// no code with the analytic formulas they are used to verify.
#pragma once

#include <functional>

#include "retsolve/errors.hpp"

namespace retsolve {

struct Bracket {
  double lo = 0, hi = 0;
  double f_lo = 0, f_hi = 0;
};

// Evaluates f at both ends; throws NumericError(NoSignChange) unless the
// signs differ or an endpoint is an exact root.
Bracket make_bracket(const std::function<double(double)>& f, double lo,
                     double hi);

struct RootOptions {
  double rtol = 1e-12;
  double abs_tol = 1e-14;
  int max_iter = 200;
};

// Brent-style solver: bisection with secant / inverse-quadratic speedups,
// guaranteed interval shrinkage. The result never leaves the bracket.
double find_root(const std::function<double(double)>& f, const Bracket& br,
                 const RootOptions& opt = {});

struct QuadratureOptions {
  double rtol = 1e-10;
  double abs_tol = 0;  // extra absolute goal; 0 means purely relative
  int max_depth = 48;
  long max_evaluations = 500000;
};

struct QuadratureResult {
  double value = 0;
  double abs_error_estimate = 0;
  long evaluations = 0;
  bool converged = false;  // error goal met; a false value is advisory only
};

// Globally adaptive 7/15 Gauss-Kronrod on a finite interval; the worst
// segment (by error estimate) is bisected first.
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, const QuadratureOptions& opt = {});

// Integral over [a, infinity): the head [a, b], b = max(a,0)+1, directly,
// the tail in log coordinates y = b e^w with w mapped rationally onto
// [0,1). In log coordinates an algebraic tail y^-p becomes exponential, so
// the adaptive rule resolves even p close to 1 (the slow power tails this
// library produces) without deep endpoint bisection.
QuadratureResult integrate_semi_infinite(const std::function<double(double)>& f,
                                         double a,
                                         const QuadratureOptions& opt = {});

double default_fd_step(double x);
double default_fd_step(double x, int order);

// Central difference of order 1, 2 or 3; h <= 0 selects the default step
// max(1e-5 |x|, 1e-8).
double fd_derivative(const std::function<double(double)>& f, double x,
                     int order, double h = 0);

}  // namespace retsolve
