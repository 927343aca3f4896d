#include "bregcr/quadrature.hpp"

#include "bregcr/errors.hpp"
#include "bregcr/specfun.hpp"

#include <cmath>
#include <algorithm>
#include <string>
#include <vector>

namespace bregcr {

namespace {

const QuadratureRule& cached_rule(int order) {
    if (order == 32) {
        static const QuadratureRule rule32 = gauss_legendre(32);
        return rule32;
    }
    thread_local QuadratureRule last;
    if (last.order != order) last = gauss_legendre(order);
    return last;
}

double apply_rule(const QuadratureRule& rule, const Integrand& f, double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double s = 0.0;
    for (int i = 0; i < rule.order; ++i) s += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return s * half;
}

struct Panel {
    double a, b;
    double left, right;
    double err;
    double estimate() const { return left + right; }
    bool operator<(const Panel& o) const { return err < o.err; }
};

}  // namespace

QuadResult integrate(const Integrand& f, double a, double b, const QuadOptions& opt) {
    if (!(b >= a)) throw DomainError("integrate: reversed or NaN interval");
    if (a == b) return {};
    const QuadratureRule& rule = cached_rule(opt.order);

    auto make_panel = [&](double lo, double hi, double whole) {
        const double mid = 0.5 * (lo + hi);
        Panel p{lo, hi, apply_rule(rule, f, lo, mid), apply_rule(rule, f, mid, hi), 0.0};
        p.err = std::abs(whole - p.estimate());
        return p;
    };

    std::vector<Panel> heap;
    heap.push_back(make_panel(a, b, apply_rule(rule, f, a, b)));
    const double min_width = (b - a) * 1e-15;
    double total = heap[0].estimate();
    double total_err = heap[0].err;
    double abs_sum = std::abs(heap[0].left) + std::abs(heap[0].right);

    while (true) {
        if (!std::isfinite(total)) throw NonConvergenceError("integrate: non-finite integrand value");
        auto converged = [&] {
            const double target = std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
            return total_err <= target || total_err <= 1e-15 * abs_sum;
        };
        if (converged()) {
            // Re-sum from scratch so running-sum drift cannot fake convergence.
            total = total_err = abs_sum = 0.0;
            for (const auto& p : heap) {
                total += p.estimate();
                total_err += p.err;
                abs_sum += std::abs(p.left) + std::abs(p.right);
            }
            if (converged()) return {total, total_err, static_cast<int>(heap.size())};
        }
        if (static_cast<int>(heap.size()) >= opt.max_panels)
            throw NonConvergenceError("integrate: panel budget exhausted (error " +
                                      std::to_string(total_err) + ")");
        std::pop_heap(heap.begin(), heap.end());
        const Panel worst = heap.back();
        heap.pop_back();
        if (worst.b - worst.a < min_width)
            throw NonConvergenceError("integrate: panel width underflow near " + std::to_string(worst.a));
        const double mid = 0.5 * (worst.a + worst.b);
        for (const Panel& child : {make_panel(worst.a, mid, worst.left), make_panel(mid, worst.b, worst.right)}) {
            heap.push_back(child);
            std::push_heap(heap.begin(), heap.end());
            total += child.estimate();
            total_err += child.err;
            abs_sum += std::abs(child.left) + std::abs(child.right);
        }
        total -= worst.estimate();
        total_err -= worst.err;
        abs_sum -= std::abs(worst.left) + std::abs(worst.right);
    }
}

QuadResult integrate_to_infinity(const Integrand& f, double a, double scale, const QuadOptions& opt) {
    if (!(scale > 0.0)) throw DomainError("integrate_to_infinity: scale must be positive");
    auto g = [&](double t) {
        const double one_minus = 1.0 - t;
        const double x = a + scale * t / one_minus;
        if (!std::isfinite(x)) return 0.0;
        const double fx = f(x);
        if (fx == 0.0) return 0.0;
        return fx * scale / (one_minus * one_minus);
    };
    return integrate(g, 0.0, 1.0, opt);
}

QuadResult integrate_beta_kernel(const Integrand& g, double p, double q, const QuadOptions& opt) {
    if (!(p > 0.0 && q > 0.0)) throw DomainError("integrate_beta_kernel: exponents must be positive");
    // The substitution only pays off for an endpoint power below 1; for larger
    // powers it crowds the whole half-interval into a sliver near u = 0.
    auto half = [&](double e, double other, bool mirrored) {
        auto at = [&, mirrored](double s) { return mirrored ? g(1.0 - s) : g(s); };
        if (e >= 2.0) {
            return integrate(
                [&](double s) { return std::pow(s, e - 1.0) * std::pow(1.0 - s, other - 1.0) * at(s); }, 0.0, 0.5,
                opt);
        }
        return integrate(
            [&](double u) {
                const double s = std::pow(u, 1.0 / e);
                return std::pow(1.0 - s, other - 1.0) * at(s) / e;
            },
            0.0, std::pow(0.5, e), opt);
    };
    const QuadResult l = half(p, q, false);
    const QuadResult r = half(q, p, true);
    return {l.value + r.value, l.error + r.error, l.panels + r.panels};
}

QuadResult integrate_power_kernel(const Integrand& g, double p, double split, const QuadOptions& opt) {
    if (!(p > 0.0 && split > 0.0)) throw DomainError("integrate_power_kernel: p and split must be positive");
    auto tail = [&](double x) { return std::pow(x, p - 1.0) * g(x); };
    const QuadResult l = p >= 2.0 ? integrate(tail, 0.0, split, opt)
                                  : integrate([&](double u) { return g(std::pow(u, 1.0 / p)) / p; }, 0.0,
                                              std::pow(split, p), opt);
    const QuadResult r = integrate_to_infinity(tail, split, split, opt);
    return {l.value + r.value, l.error + r.error, l.panels + r.panels};
}

}  // namespace bregcr
