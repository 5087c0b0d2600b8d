#include <cmath>

#include "doctest.h"
#include "retsolve/numerics.hpp"

using namespace retsolve;

TEST_CASE("root finder on standard problems") {
  const auto cosx = [](double x) { return std::cos(x); };
  const double half_pi =
      find_root(cosx, make_bracket(cosx, 1.0, 2.0));
  CHECK(half_pi == doctest::Approx(std::acos(-1.0) / 2).epsilon(1e-14));

  // Flat near the root: x^3 - 1e-9 around x ~ 1e-3.
  const auto cubic = [](double x) { return x * x * x - 1e-9; };
  const double r = find_root(cubic, make_bracket(cubic, 0.0, 1.0));
  CHECK(r == doctest::Approx(1e-3).epsilon(1e-10));

  // An exact root at an endpoint is returned as-is.
  const auto line = [](double x) { return x - 2.0; };
  CHECK(find_root(line, make_bracket(line, 2.0, 5.0)) == 2.0);
}

TEST_CASE("root finder rejects unbracketed input") {
  const auto pos = [](double x) { return x * x + 1.0; };
  CHECK_THROWS_AS(make_bracket(pos, -1.0, 1.0), NumericError);
  try {
    make_bracket(pos, -1.0, 1.0);
  } catch (const NumericError& e) {
    CHECK(e.code() == NumericError::Code::NoSignChange);
  }
}

TEST_CASE("finite-interval quadrature") {
  QuadratureOptions opt;
  opt.rtol = 1e-12;

  const auto res = integrate([](double x) { return std::exp(x); }, 0.0, 1.0,
                             opt);
  CHECK(res.converged);
  CHECK(res.value ==
        doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));

  // Oscillatory integrand forces several bisections.
  const auto osc = integrate([](double x) { return std::sin(50.0 * x); }, 0.0,
                             3.0, opt);
  CHECK(osc.converged);
  CHECK(osc.value ==
        doctest::Approx((1.0 - std::cos(150.0)) / 50.0).epsilon(1e-10));

  // Integrable endpoint singularity 1/sqrt(x).
  const auto sing =
      integrate([](double x) { return 1.0 / std::sqrt(x); }, 1e-300, 1.0, opt);
  CHECK(sing.value == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("semi-infinite quadrature resolves slow power tails") {
  QuadratureOptions opt;
  opt.rtol = 1e-11;

  // int_1^inf x^-2 dx = 1; the tail past x ~ 1e15 contributes ~1e-15 that
  // the naive t-variable map cannot even see.
  const auto inv2 = integrate_semi_infinite(
      [](double x) { return 1.0 / (x * x); }, 1.0, opt);
  CHECK(inv2.converged);
  CHECK(inv2.value == doctest::Approx(1.0).epsilon(1e-11));

  // int_2^inf x^-1.3 dx = 2^-0.3/0.3. The tail past 1e15 is ~6e-5 in
  // relative terms, far above the tolerance unless the far map is exact.
  const auto slow = integrate_semi_infinite(
      [](double x) { return std::pow(x, -1.3); }, 2.0, opt);
  CHECK(slow.converged);
  CHECK(slow.value ==
        doctest::Approx(std::pow(2.0, -0.3) / 0.3).epsilon(1e-10));

  // Gaussian tail from 0.
  const auto gauss = integrate_semi_infinite(
      [](double x) { return std::exp(-x * x); }, 0.0, opt);
  CHECK(gauss.value ==
        doctest::Approx(std::sqrt(std::acos(-1.0)) / 2).epsilon(1e-12));
}

TEST_CASE("quadrature reports evaluation budget exhaustion") {
  QuadratureOptions opt;
  opt.rtol = 1e-15;
  opt.max_evaluations = 45;  // room for at most the first refinement
  const auto res =
      integrate([](double x) { return std::sin(50.0 * x); }, 0.0, 3.0, opt);
  CHECK_FALSE(res.converged);
}

TEST_CASE("finite differences") {
  const auto f = [](double x) { return std::exp(2.0 * x); };
  const double x = 0.3;
  const double fx = std::exp(2.0 * x);
  CHECK(fd_derivative(f, x, 1) == doctest::Approx(2.0 * fx).epsilon(1e-9));
  CHECK(fd_derivative(f, x, 2) == doctest::Approx(4.0 * fx).epsilon(1e-6));
  CHECK(fd_derivative(f, x, 3, 1e-3) ==
        doctest::Approx(8.0 * fx).epsilon(1e-6));
  CHECK(default_fd_step(0.0) == 1e-8);
  CHECK(default_fd_step(100.0) == doctest::Approx(1e-3).epsilon(1e-12));
}
