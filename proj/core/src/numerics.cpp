#include "retsolve/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

namespace retsolve {

Bracket make_bracket(const std::function<double(double)>& f, double lo,
                     double hi) {
  Bracket br;
  br.lo = lo;
  br.hi = hi;
  br.f_lo = f(lo);
  br.f_hi = f(hi);
  if (br.f_lo != 0.0 && br.f_hi != 0.0 &&
      (br.f_lo > 0.0) == (br.f_hi > 0.0)) {
    throw NumericError(NumericError::Code::NoSignChange,
                       "no sign change over the bracket");
  }
  return br;
}

double find_root(const std::function<double(double)>& f, const Bracket& br,
                 const RootOptions& opt) {
  double a = br.lo, b = br.hi, fa = br.f_lo, fb = br.f_hi;
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    throw NumericError(NumericError::Code::NoSignChange,
                       "no sign change over the bracket");
  }
  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int iter = 0; iter < opt.max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 =
        2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) +
        0.5 * (opt.rtol * std::abs(b) + opt.abs_tol);
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc;
        const double rr = fb / fc;
        p = s * (2.0 * xm * qq * (qq - rr) - (b - a) * (rr - 1.0));
        q = (qq - 1.0) * (rr - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q),
                             std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
  }
  throw NumericError(NumericError::Code::MaxIterExceeded,
                     "root finder exhausted its iteration budget");
}

namespace {

// 15-point Kronrod abscissae (positive half) and weights, with the embedded
// 7-point Gauss rule on the odd indices. Standard QUADPACK dqk15 constants.
constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
constexpr double kWgk[8] = {
    0.02293532201052922, 0.06309209262997855, 0.1047900103222502,
    0.1406532597155259,  0.1690047266392679,  0.1903505780647854,
    0.2044329400752989,  0.2094821410847278};
constexpr double kWg[4] = {0.1294849661688697, 0.2797053914892767,
                           0.3818300505051189, 0.4179591836734694};

struct Segment {
  double a, b;
  double value;
  double error;
  int depth;
};

struct WorseError {
  bool operator()(const Segment& x, const Segment& y) const {
    return x.error < y.error;
  }
};

Segment gauss_kronrod_15(const std::function<double(double)>& f, double a,
                         double b, int depth) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resg = kWg[3] * fc;
  double resk = kWgk[7] * fc;
  for (int j = 0; j < 7; ++j) {
    const double x = half * kXgk[j];
    const double fsum = f(center - x) + f(center + x);
    resk += kWgk[j] * fsum;
    if (j % 2 == 1) resg += kWg[j / 2] * fsum;
  }
  Segment seg;
  seg.a = a;
  seg.b = b;
  seg.value = resk * half;
  seg.error = std::abs((resk - resg) * half);
  seg.depth = depth;
  return seg;
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, const QuadratureOptions& opt) {
  QuadratureResult res;
  if (a == b) {
    res.converged = true;
    return res;
  }
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }

  std::priority_queue<Segment, std::vector<Segment>, WorseError> open;
  Segment first = gauss_kronrod_15(f, a, b, 0);
  res.evaluations = 15;
  double total_value = first.value;
  double open_error = first.error;
  double closed_error = 0;  // error of segments at max depth, kept as-is
  open.push(first);

  const auto goal = [&]() {
    return std::max({opt.rtol * std::abs(total_value), opt.abs_tol,
                     std::numeric_limits<double>::min()});
  };

  while (open_error + closed_error > goal() && !open.empty() &&
         res.evaluations + 30 <= opt.max_evaluations) {
    Segment worst = open.top();
    open.pop();
    open_error -= worst.error;
    if (worst.depth >= opt.max_depth) {
      closed_error += worst.error;
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    Segment left = gauss_kronrod_15(f, worst.a, mid, worst.depth + 1);
    Segment right = gauss_kronrod_15(f, mid, worst.b, worst.depth + 1);
    res.evaluations += 30;
    total_value += left.value + right.value - worst.value;
    open_error += left.error + right.error;
    open.push(left);
    open.push(right);
  }

  res.value = sign * total_value;
  res.abs_error_estimate = open_error + closed_error;
  res.converged = res.abs_error_estimate <= goal();
  return res;
}

QuadratureResult integrate_semi_infinite(const std::function<double(double)>& f,
                                         double a,
                                         const QuadratureOptions& opt) {
  QuadratureOptions part_opt = opt;
  part_opt.rtol = opt.rtol / 3.0;
  if (opt.abs_tol > 0) part_opt.abs_tol = opt.abs_tol / 3.0;
  part_opt.max_evaluations = opt.max_evaluations / 3;

  // Head [a, b] directly; tail [b, infinity) in log coordinates y = b e^w,
  // where an algebraic tail y^-p becomes the exponential e^-(p-1)w and the
  // rational map below resolves it without deep endpoint bisection.
  const double b = std::max(a, 0.0) + 1.0;
  const auto tail = [&](double w) {
    const double y = b * std::exp(w);
    if (!std::isfinite(y)) return 0.0;  // convergence forces f -> 0
    return f(y) * y;
  };
  // w in [0, 1]: t in [0, 1/2]; w in [1, infinity): u = 1-t in (0, 1/2],
  // evaluated without forming t.
  const auto tail_near = [&](double t) {
    const double om = 1.0 - t;
    return tail(t / om) / (om * om);
  };
  const auto tail_far = [&](double u) {
    return tail((1.0 - u) / u) / (u * u);
  };

  const QuadratureResult head = integrate(f, a, b, part_opt);
  const QuadratureResult lo = integrate(tail_near, 0.0, 0.5, part_opt);
  const QuadratureResult hi = integrate(tail_far, 0.0, 0.5, part_opt);

  QuadratureResult res;
  res.value = head.value + lo.value + hi.value;
  res.abs_error_estimate = head.abs_error_estimate + lo.abs_error_estimate +
                           hi.abs_error_estimate;
  res.evaluations = head.evaluations + lo.evaluations + hi.evaluations;
  res.converged =
      res.abs_error_estimate <=
      std::max({opt.rtol * std::abs(res.value), opt.abs_tol,
                std::numeric_limits<double>::min()});
  return res;
}

double default_fd_step(double x) { return default_fd_step(x, 1); }

// Steps balancing truncation against roundoff per order: the second and
// third differences divide by h^2 and h^3, so they need far larger steps.
double default_fd_step(double x, int order) {
  switch (order) {
    case 2:
      return std::max(3e-4 * std::abs(x), 3e-6);
    case 3:
      return std::max(2e-3 * std::abs(x), 2e-5);
    default:
      return std::max(1e-5 * std::abs(x), 1e-8);
  }
}

double fd_derivative(const std::function<double(double)>& f, double x,
                     int order, double h) {
  if (h <= 0) h = default_fd_step(x, order);
  switch (order) {
    case 1:
      return (f(x + h) - f(x - h)) / (2.0 * h);
    case 2:
      return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    case 3:
      return (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) -
              f(x - 2.0 * h)) /
             (2.0 * h * h * h);
    default:
      throw std::invalid_argument("fd_derivative supports orders 1..3");
  }
}

}  // namespace retsolve
