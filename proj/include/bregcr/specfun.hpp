#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <vector>

namespace bregcr {

// ln Gamma(x) for x > 0.
double log_gamma(double x);

double digamma(double x);

// ln B(a, b) = ln Gamma(a) + ln Gamma(b) - ln Gamma(a + b).
double log_beta(double a, double b);

// Gauss hypergeometric function 2F1(a, b; c; z) for z in [0, 1].
// Power series for z <= 0.9 (or when the series terminates), Euler integral
// above, Gauss's summation theorem at z = 1.
double gauss_2f1(double a, double b, double c, double z);

// The two evaluation paths, exposed so they can be compared.
double gauss_2f1_series(double a, double b, double c, double z);
double gauss_2f1_euler(double a, double b, double c, double z);

using StirlingCount = boost::multiprecision::checked_uint256_t;

// Stirling numbers of the second kind, exact for m <= 64; zero for k < 0 or k > m.
StirlingCount stirling2(int m, int k);
double stirling2_real(int m, int k);

// n (n-1) ... (n-k+1); 1 for k = 0 and 0 for k < 0.
double falling_factorial(double n, int k);

struct QuadratureRule {
    int order = 0;
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule on [-1, 1], 1 <= order <= 256.
QuadratureRule gauss_legendre(int order);

}  // namespace bregcr
