#include "bregcr/oracles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bregcr::oracle {

namespace {

double level_sum(const Fn& f, double a, double b, double h, double offset, double t_max) {
    // Sum over nodes t = offset + k*h, k >= 0 and their mirrors (offset > 0).
    const double half_pi = 0.5 * std::numbers::pi;
    const double width = b - a;
    double s = 0.0;
    for (double t = offset; t <= t_max; t += h) {
        const double u = half_pi * std::sinh(t);
        const double e = std::exp(-2.0 * u);
        const double dist = width * e / (1.0 + e);
        const double w = width * half_pi * std::cosh(t) * 2.0 * e / ((1.0 + e) * (1.0 + e));
        if (w == 0.0 || dist == 0.0) break;
        const double right = f(b - dist);
        if (std::isfinite(right)) s += w * right;
        if (t == 0.0) continue;
        const double left = f(a + dist);
        if (std::isfinite(left)) s += w * left;
    }
    return s;
}

}  // namespace

double tanh_sinh(const Fn& f, double a, double b, double rel_tol) {
    if (a == b) return 0.0;
    const double t_max = 6.5;
    double h = 0.5;
    double sum = level_sum(f, a, b, h, 0.0, t_max);
    double estimate = sum * h;
    for (int level = 1; level <= 12; ++level) {
        h *= 0.5;
        sum += level_sum(f, a, b, 2.0 * h, h, t_max);
        const double next = sum * h;
        if (level >= 3 && std::abs(next - estimate) <= rel_tol * std::abs(next)) return next;
        estimate = next;
    }
    return estimate;
}

double tanh_sinh_to_infinity(const Fn& f, double a, double scale, double rel_tol) {
    auto g = [&](double s) {
        const double om = 1.0 - s;
        const double x = a + scale * s / om;
        if (!std::isfinite(x)) return 0.0;
        const double fx = f(x);
        return fx == 0.0 ? 0.0 : fx * scale / (om * om);
    };
    return tanh_sinh(g, 0.0, 1.0, rel_tol);
}

double gamma_pdf(double alpha, double theta, double x) {
    if (x < 0.0) return 0.0;
    if (x == 0.0) return theta < 1.0 ? INFINITY : (theta == 1.0 ? alpha : 0.0);
    return std::exp(theta * std::log(alpha) + (theta - 1.0) * std::log(x) - alpha * x - std::lgamma(theta));
}

double beta_pdf(double alpha, double beta, double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    const double lb = std::lgamma(alpha) + std::lgamma(beta) - std::lgamma(alpha + beta);
    return std::exp((alpha - 1.0) * std::log(x) + (beta - 1.0) * std::log1p(-x) - lb);
}

double gamma_expect(double alpha, double theta, const Fn& f, double rel_tol) {
    const double mean = theta / alpha;
    // Split at the mean so both halves are smooth away from the endpoints.
    auto g = [&](double x) {
        const double p = gamma_pdf(alpha, theta, x);
        return p == 0.0 ? 0.0 : f(x) * p;
    };
    return tanh_sinh(g, 0.0, mean, rel_tol) + tanh_sinh_to_infinity(g, mean, mean, rel_tol);
}

double beta_expect(double alpha, double beta, const Fn& f, double rel_tol) {
    const double lb = std::lgamma(alpha) + std::lgamma(beta) - std::lgamma(alpha + beta);
    auto density = [&](double x, double one_minus_x) {
        return std::exp((alpha - 1.0) * std::log(x) + (beta - 1.0) * std::log(one_minus_x) - lb);
    };
    auto left = [&](double x) {
        const double p = density(x, 1.0 - x);
        return p == 0.0 ? 0.0 : f(x) * p;
    };
    // Upper half in s = 1 - x so the density near x = 1 sees the exact gap.
    auto right = [&](double s) {
        const double p = density(1.0 - s, s);
        return p == 0.0 ? 0.0 : f(1.0 - s) * p;
    };
    const double m = alpha / (alpha + beta);
    return tanh_sinh(left, 0.0, m, rel_tol) + tanh_sinh(right, 0.0, 1.0 - m, rel_tol);
}

double poisson_pmf(double mean, long y) {
    if (y < 0) return 0.0;
    if (mean == 0.0) return y == 0 ? 1.0 : 0.0;
    return std::exp(static_cast<double>(y) * std::log(mean) - mean - std::lgamma(static_cast<double>(y) + 1.0));
}

double binomial_pmf(int n, double p, long y) {
    if (y < 0 || y > n) return 0.0;
    if (p == 0.0) return y == 0 ? 1.0 : 0.0;
    if (p == 1.0) return y == n ? 1.0 : 0.0;
    const double yy = static_cast<double>(y);
    const double lc = std::lgamma(n + 1.0) - std::lgamma(yy + 1.0) - std::lgamma(n - yy + 1.0);
    return std::exp(lc + yy * std::log(p) + (n - yy) * std::log1p(-p));
}

double hyp2f1_sum(double a, double b, double c, double z) {
    if (!(z < 1.0)) throw std::domain_error("hyp2f1_sum: needs z < 1");
    long double term = 1.0L, sum = 1.0L;
    for (long k = 0; k < 20000000; ++k) {
        term *= (static_cast<long double>(a) + k) * (static_cast<long double>(b) + k) /
                ((static_cast<long double>(c) + k) * (k + 1.0L)) * z;
        sum += term;
        if (term == 0.0L) break;
        if (k > 50 && std::fabs(term) < 1e-22L * std::fabs(sum) &&
            std::fabs(term * z) < 1e-22L * std::fabs(sum))
            break;
    }
    return static_cast<double>(sum);
}

double hyp2f1_integral(double a, double b, double c, double z) {
    if (!(c > b && b > 0.0)) throw std::domain_error("hyp2f1_integral: needs c > b > 0");
    const double lb = std::lgamma(b) + std::lgamma(c - b) - std::lgamma(c);
    // Both halves are written with the singular endpoint at 0, where tanh-sinh
    // nodes are represented without cancellation.
    auto left = [&](double t) {
        return std::pow(t, b - 1.0) * std::pow(1.0 - t, c - b - 1.0) * std::pow(1.0 - z * t, -a);
    };
    auto right = [&](double s) {
        return std::pow(1.0 - s, b - 1.0) * std::pow(s, c - b - 1.0) * std::pow(1.0 - z + z * s, -a);
    };
    return (tanh_sinh(left, 0.0, 0.5, 1e-14) + tanh_sinh(right, 0.0, 0.5, 1e-14)) * std::exp(-lb);
}

double derivative(const Fn& f, double x, double h) {
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

}  // namespace bregcr::oracle
