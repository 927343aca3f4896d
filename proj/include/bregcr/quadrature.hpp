#pragma once

#include <functional>

namespace bregcr {

struct QuadOptions {
    int order = 32;
    double rel_tol = 1e-11;
    double abs_tol = 1e-300;
    int max_panels = 4000;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int panels = 0;
};

using Integrand = std::function<double(double)>;

// Globally adaptive Gauss-Legendre: the panel with the largest error estimate
// (whole-panel rule vs. the two half-panel rules) is bisected until the summed
// estimate meets max(abs_tol, rel_tol * |I|).  Throws NonConvergenceError.
QuadResult integrate(const Integrand& f, double a, double b, const QuadOptions& opt = {});

// Integral over [a, inf) through x = a + scale * t / (1 - t).
QuadResult integrate_to_infinity(const Integrand& f, double a, double scale,
                                 const QuadOptions& opt = {});

// Integral of x^(p-1) (1-x)^(q-1) g(x) over [0, 1] for p, q > 0.  Endpoint
// powers below 2 are absorbed exactly by substituting x = u^(1/p) on [0, 1/2]
// and 1 - x = w^(1/q) on [1/2, 1], so g only needs to be smooth.
QuadResult integrate_beta_kernel(const Integrand& g, double p, double q, const QuadOptions& opt = {});

// Integral of x^(p-1) g(x) over [0, inf) for p > 0, g decaying; a power below 2
// is absorbed on [0, split] and the remainder mapped to a finite interval.
QuadResult integrate_power_kernel(const Integrand& g, double p, double split, const QuadOptions& opt = {});

}  // namespace bregcr
