#pragma once

// Reference computations that share no code with the library's numerical
// paths: double-exponential quadrature, libm gamma functions and brute-force
// sums.  Used by the tests, the acceptance suite and `bregcr verify`.

#include <functional>

namespace bregcr::oracle {

using Fn = std::function<double(double)>;

// Tanh-sinh quadrature on [a, b]; tolerates integrable endpoint singularities.
double tanh_sinh(const Fn& f, double a, double b, double rel_tol = 1e-13);

// Integral over [a, inf) via x = a + scale * s / (1 - s) and tanh-sinh in s.
double tanh_sinh_to_infinity(const Fn& f, double a, double scale, double rel_tol = 1e-13);

double gamma_pdf(double alpha, double theta, double x);
double beta_pdf(double alpha, double beta, double x);

// E[f(X)] under Gamma(rate alpha, shape theta) or Beta(alpha, beta).
double gamma_expect(double alpha, double theta, const Fn& f, double rel_tol = 1e-12);
double beta_expect(double alpha, double beta, const Fn& f, double rel_tol = 1e-12);

double poisson_pmf(double mean, long y);
double binomial_pmf(int n, double p, long y);

// 2F1 by direct summation in long double for z < 1, and by tanh-sinh
// quadrature of Euler's integral when c > b > 0.
double hyp2f1_sum(double a, double b, double c, double z);
double hyp2f1_integral(double a, double b, double c, double z);

// Numerical derivative by a 5-point central stencil.
double derivative(const Fn& f, double x, double h);

}  // namespace bregcr::oracle
