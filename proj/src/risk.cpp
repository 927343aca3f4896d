#include "bregcr/risk.hpp"

#include "bregcr/errors.hpp"
#include "parallel.hpp"
#include "bregcr/quadrature.hpp"
#include "bregcr/specfun.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>

namespace bregcr {

namespace {

constexpr std::size_t block_size = 4096;
constexpr double inf = std::numeric_limits<double>::infinity();

using detail::for_each_index;

double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 32) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

template <class Term>
double blocked_sum(std::size_t n, bool parallel, Term&& term) {
    const std::size_t blocks = (n + block_size - 1) / block_size;
    std::vector<double> sums(blocks);
    for_each_index(blocks, parallel, [&](std::size_t b) {
        const std::size_t lo = b * block_size;
        const std::size_t len = std::min(block_size, n - lo);
        double buf[block_size];
        for (std::size_t i = 0; i < len; ++i) buf[i] = term(lo + i);
        sums[b] = pairwise_sum(buf, len);
    });
    double total = 0.0;
    for (double s : sums) total += s;
    return total;
}

RiskEstimate summarize_impl(const std::vector<double>& values, std::uint64_t seed, bool parallel) {
    RiskEstimate r;
    r.n_samples = values.size();
    r.seed = seed;
    if (values.empty()) return r;
    const double n = static_cast<double>(values.size());
    r.mean = blocked_sum(values.size(), parallel, [&](std::size_t i) { return values[i]; }) / n;
    if (values.size() > 1) {
        const double ss = blocked_sum(values.size(), parallel, [&](std::size_t i) {
            const double e = values[i] - r.mean;
            return e * e;
        });
        r.std_error = std::sqrt(ss / (n - 1.0) / n);
    }
    return r;
}

std::vector<Draw> draws_impl(const Prior& prior, const Channel& ch, std::size_t n, std::uint64_t seed,
                             bool parallel) {
    validate(prior);
    validate(ch);
    std::vector<Draw> out(n);
    for_each_index(n, parallel, [&](std::size_t i) { out[i] = draw_at(prior, ch, seed, i); });
    return out;
}

std::vector<double> table_impl(const EstimatorSpec& est, const Prior& prior, const Channel& ch,
                               const std::vector<Draw>& draws, bool parallel) {
    long ymax = 0;
    for (const auto& d : draws) ymax = std::max(ymax, d.y);
    std::vector<char> present(static_cast<std::size_t>(ymax) + 1, 0);
    for (const auto& d : draws) present[static_cast<std::size_t>(d.y)] = 1;
    std::vector<long> outputs;
    for (long y = 0; y <= ymax; ++y)
        if (present[static_cast<std::size_t>(y)]) outputs.push_back(y);
    std::vector<double> table(present.size(), 0.0);
    for_each_index(outputs.size(), parallel, [&](std::size_t k) {
        table[static_cast<std::size_t>(outputs[k])] = estimate(est, prior, ch, outputs[k]);
    });
    return table;
}

RiskEstimate risk_impl(const Generator& gen, const Prior& prior, const Channel& ch, const EstimatorSpec& est,
                       std::size_t n, std::uint64_t seed, bool parallel) {
    if (n < 100) throw DomainError("Monte-Carlo risk needs at least 100 samples");
    if (gen.dimension() != 1) throw DomainError("Monte-Carlo risk is defined for scalar generators");
    const std::vector<Draw> draws = draws_impl(prior, ch, n, seed, parallel);

    const std::vector<double> table = table_impl(est, prior, ch, draws, parallel);

    std::vector<double> losses(n);
    for_each_index(n, parallel, [&](std::size_t i) {
        const double x = draws[i].x;
        const double g = table[static_cast<std::size_t>(draws[i].y)];
        try {
            if (!gen.in_domain(x) || !gen.in_interior(g)) throw DomainError("outside the generator domain");
            losses[i] = bregman(gen, x, g);
            if (!std::isfinite(losses[i])) throw DomainError("non-finite loss");
        } catch (const Error& e) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "sample " << i << " (x = " << x << ", y = " << draws[i].y << ", g(y) = " << g
                << "): " << e.what();
            throw DomainError(msg.str());
        }
    });
    return summarize_impl(losses, seed, parallel);
}

void check_natural_pair(const Prior& prior, const Channel& ch) {
    validate(prior);
    validate(ch);
    if (std::holds_alternative<GammaPrior>(prior) && std::holds_alternative<BinomialChannel>(ch))
        throw DomainError("gamma prior cannot feed a binomial channel (unbounded input)");
}

// psi(s + 1) - log s, positive and below 1/(2s).
double digamma_gap(double s) {
    if (s >= 20.0) {
        const double r = 1.0 / s, r2 = r * r;
        return r * (0.5 - r * (1.0 / 12 - r2 * (1.0 / 120 - r2 * (1.0 / 252 - r2 * (1.0 / 240 - r2 / 132)))));
    }
    return digamma(s + 1.0) - std::log(s);
}

struct Accumulator {
    double sum = 0.0;
    double comp = 0.0;
    void add(double v) {
        const double t = sum + v;
        comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

double gamma_expectation(const GammaPrior& g, const std::function<double(double)>& f) {
    QuadOptions opt;
    opt.rel_tol = 1e-12;
    const double lc = g.theta * std::log(g.alpha) - log_gamma(g.theta);
    const double split = std::max(g.theta, 1.0) / g.alpha;
    return std::exp(lc) *
           integrate_power_kernel([&](double x) { return std::exp(-g.alpha * x) * f(x); }, g.theta, split, opt).value;
}

double beta_expectation(const BetaPrior& b, const std::function<double(double)>& f) {
    QuadOptions opt;
    opt.rel_tol = 1e-12;
    return integrate_beta_kernel(f, b.alpha, b.beta, opt).value / std::exp(log_beta(b.alpha, b.beta));
}

double logit_weight(double m) {
    if (!(m > 0.0 && m < 1.0)) throw DomainError("linear estimate leaves (0, 1)");
    return m * std::log((1.0 - m) / m);
}

}  // namespace

EstimatorSpec EstimatorSpec::linear(double c, double d, std::optional<Interval> clamp) {
    return {LinearEstimator{c, d}, clamp};
}

EstimatorSpec EstimatorSpec::posterior_mean(PosteriorMode mode, std::optional<Interval> clamp) {
    return {PosteriorMeanEstimator{mode}, clamp};
}

std::optional<Interval> interior_clamp(const Generator& gen) {
    switch (gen.kind()) {
        case GeneratorKind::neg_entropy:
        case GeneratorKind::neg_binomial:
        case GeneratorKind::generalized_i_divergence:
            return Interval{interior_margin, inf};
        case GeneratorKind::binary_logit:
            return Interval{interior_margin, 1.0 - interior_margin};
        default:
            return std::nullopt;
    }
}

double estimate(const EstimatorSpec& est, const Prior& prior, const Channel& ch, long y) {
    double g;
    if (const auto* lin = std::get_if<LinearEstimator>(&est.kind)) {
        g = lin->c * static_cast<double>(y) + lin->d;
    } else {
        g = posterior_mean(prior, ch, y, std::get<PosteriorMeanEstimator>(est.kind).mode);
    }
    if (est.clamp) g = std::clamp(g, est.clamp->lower, est.clamp->upper);
    return g;
}

Draw draw_at(const Prior& prior, const Channel& ch, std::uint64_t seed, std::size_t index) {
    Substream rng(seed, index);
    Draw d;
    d.x = sample(prior, rng);
    d.y = sample(ch, d.x, rng);
    return d;
}

std::vector<Draw> draw_joint(const Prior& prior, const Channel& ch, std::size_t n, std::uint64_t seed) {
    return draws_impl(prior, ch, n, seed, true);
}

std::vector<double> estimate_table(const EstimatorSpec& est, const Prior& prior, const Channel& ch,
                                   const std::vector<Draw>& draws) {
    return table_impl(est, prior, ch, draws, true);
}

RiskEstimate summarize(const std::vector<double>& values, std::uint64_t seed) {
    return summarize_impl(values, seed, true);
}

RiskEstimate summarize_serial(const std::vector<double>& values, std::uint64_t seed) {
    return summarize_impl(values, seed, false);
}

RiskEstimate monte_carlo_expectation(const Prior& prior, const Channel& ch, std::size_t n, std::uint64_t seed,
                                     const std::function<double(const Draw&)>& f) {
    const std::vector<Draw> draws = draws_impl(prior, ch, n, seed, true);
    std::vector<double> values(n);
    for_each_index(n, true, [&](std::size_t i) { values[i] = f(draws[i]); });
    return summarize_impl(values, seed, true);
}

RiskEstimate monte_carlo_risk(const Generator& gen, const Prior& prior, const Channel& ch, const EstimatorSpec& est,
                              std::size_t n, std::uint64_t seed) {
    return risk_impl(gen, prior, ch, est, n, seed, true);
}

RiskEstimate monte_carlo_risk_serial(const Generator& gen, const Prior& prior, const Channel& ch,
                                     const EstimatorSpec& est, std::size_t n, std::uint64_t seed) {
    return risk_impl(gen, prior, ch, est, n, seed, false);
}

double lmmse_value(const Prior& prior, const Channel& ch, MomentMode mode) {
    check_natural_pair(prior, ch);
    const double ex = mean(prior);
    const double v = variance(prior);
    if (!std::isfinite(v)) throw DomainError("linear MMSE needs a finite prior variance");
    if (const auto* pc = std::get_if<PoissonChannel>(&ch)) return v / (pc->a * v / ex + 1.0);
    const auto& bc = std::get<BinomialChannel>(ch);
    if (bc.a == 0.0) return v;
    const double spread = ex - bc.a * moment(prior, 2.0, mode);  // E[X (1 - a X)]
    return v / (1.0 + bc.n * bc.a * v / spread);
}

MmseValue exact_mmse(const Prior& prior, const Channel& ch, MomentMode mode) {
    check_natural_pair(prior, ch);
    const bool gamma = std::holds_alternative<GammaPrior>(prior);
    const auto* bc = std::get_if<BinomialChannel>(&ch);
    if (!gamma && !bc)
        throw UnsupportedError("exact MMSE needs gamma+poisson or beta+binomial");
    MmseValue out;
    out.value = lmmse_value(prior, ch, mode);
    if (bc) out.exactness_verified = mode == MomentMode::corrected && (bc->a == 1.0 || bc->a == 0.0 || bc->n == 1);
    return out;
}

double exact_bregman_risk(const Generator& gen, const Prior& prior, const Channel& ch, double tol) {
    check_natural_pair(prior, ch);
    if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
    const auto* g = std::get_if<GammaPrior>(&prior);
    const auto* pc = std::get_if<PoissonChannel>(&ch);
    if (gen.kind() == GeneratorKind::neg_entropy && g && pc) {
        // Posterior Gamma(alpha + a, theta + y) with mean m(y) = (theta + y)/(alpha + a):
        // E[X log X | y] - m log m = m (psi(theta + y + 1) - log(theta + y)).
        const double r = g->alpha + pc->a;
        if (pc->a == 0.0) return g->theta / r * digamma_gap(g->theta);
        // Each term is below P(y) / (2 r), so the certified pmf tail carries over.
        const MarginalLaw law = marginal_law(prior, ch, 2.0 * r * tol);
        Accumulator acc;
        for (std::size_t y = 0; y < law.pmf.size(); ++y) {
            const double s = g->theta + static_cast<double>(y);
            acc.add(law.pmf[y] * (s / r) * digamma_gap(s));
        }
        return acc.value();
    }
    const auto* b = std::get_if<BetaPrior>(&prior);
    const auto* bc = std::get_if<BinomialChannel>(&ch);
    if (gen.kind() == GeneratorKind::binary_logit && b && bc) {
        const MarginalLaw law = marginal_law(prior, ch);
        Accumulator acc;
        if (bc->a == 1.0) {
            // Posterior Beta(p, q): E[X logit X | y] - m logit m
            //   = m ((psi(p + 1) - log p) + (log q - psi(q))),  m = p/(p + q).
            for (long y = 0; y <= bc->n; ++y) {
                const double p = b->alpha + static_cast<double>(y);
                const double q = b->beta + static_cast<double>(bc->n - y);
                const double m = p / (p + q);
                acc.add(law.pmf[static_cast<std::size_t>(y)] * m * (digamma_gap(p) + (1.0 / q - digamma_gap(q))));
            }
            return acc.value();
        }
        // The posterior is not beta for a < 1; use the quadrature posterior mean.
        acc.add(log_moment(prior, LogMomentKind::x_logit));
        for (long y = 0; y <= bc->n; ++y) {
            const double m = posterior_mean(prior, ch, y, PosteriorMode::quadrature);
            acc.add(law.pmf[static_cast<std::size_t>(y)] * logit_weight(m));
        }
        return acc.value();
    }
    throw UnsupportedError("exact Bregman risk needs neg-entropy with gamma+poisson or binary-logit with beta+binomial");
}

BTermBounds b_term_bounds(const Prior& prior, const Channel& ch) {
    check_natural_pair(prior, ch);
    if (const auto* g = std::get_if<GammaPrior>(&prior)) {
        const auto* pc = std::get_if<PoissonChannel>(&ch);
        if (!pc) throw UnsupportedError("B-term bounds need gamma+poisson or beta+binomial");
        const double r = g->alpha + pc->a;
        auto h = [&](double x) { return (pc->a * x + g->theta) / r; };
        BTermBounds out;
        out.upper = gamma_expectation(*g, [&](double x) { return x * std::log(h(x)); });
        out.lower = gamma_expectation(*g, [&](double x) {
            const double v = h(x);
            return v * std::log(v);
        });
        return out;
    }
    const auto& b = std::get<BetaPrior>(prior);
    const auto* bc = std::get_if<BinomialChannel>(&ch);
    if (!bc) throw UnsupportedError("B-term bounds need gamma+poisson or beta+binomial");
    const auto lc = lmmse_coefficients(prior, ch);
    const double slope = lc.c * bc->a * bc->n;
    BTermBounds out;
    out.upper = beta_expectation(b, [&](double x) { return logit_weight(slope * x + lc.d); });
    const double m0 = lc.d;
    const double m1 = lc.c * bc->n + lc.d;
    const double ex = mean(prior);
    if (m1 - m0 <= 1e-14 * m0) {
        out.lower = logit_weight(ex);
    } else {
        const double h0 = logit_weight(m0), h1 = logit_weight(m1);
        out.lower = h0 + (h1 - h0) * (ex - m0) / (m1 - m0);
    }
    return out;
}

SandwichBounds sandwich_bounds(const Generator& gen, const Prior& prior, const Channel& ch, std::optional<Box> box,
                               int grid) {
    if (gen.dimension() != 1) throw DomainError("sandwich bounds are defined for scalar generators");
    validate(prior);
    SandwichBounds out;
    Box used;
    if (box) {
        if (box->lower.size() != 1 || box->upper.size() != 1) throw DomainError("sandwich box must be one-dimensional");
        used = *box;
        out.mass_outside = 1.0 - (cdf(prior, used.upper[0]) - cdf(prior, used.lower[0]));
        if (!(out.mass_outside < 1e-6)) {
            std::ostringstream msg;
            msg << "Hessian bounds not certified: prior mass " << out.mass_outside << " lies outside the box";
            throw UnboundedHessianError(msg.str());
        }
    } else {
        const double lo = 0.0;
        double hi = 1.0;
        if (const auto* g = std::get_if<GammaPrior>(&prior)) {
            // Hessians of the supported generators do not grow at infinity, so
            // a far quantile stands in for the open upper end.
            hi = boost::math::gamma_q_inv(g->theta, 1e-7) / g->alpha;
            out.mass_outside = 1e-7;
        }
        for (double end : {lo, hi}) {
            const bool closed_end = end == lo || std::holds_alternative<BetaPrior>(prior);
            if (closed_end && (!gen.in_interior(end) || !std::isfinite(gen.second_derivative(end))))
                throw UnboundedHessianError("Hessian is unbounded at the prior support endpoint " +
                                            std::to_string(end));
        }
        used.lower = Point::Constant(1, lo);
        used.upper = Point::Constant(1, hi);
    }
    out.kappa = sandwich_constants(gen, used, grid);
    const double mmse = exact_mmse(prior, ch).value;
    out.low = 0.5 * out.kappa.kappa_l * mmse;
    out.high = 0.5 * out.kappa.kappa_u * mmse;
    return out;
}

}  // namespace bregcr
