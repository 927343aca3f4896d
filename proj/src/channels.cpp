#include "bregcr/channels.hpp"

#include "bregcr/errors.hpp"
#include "bregcr/quadrature.hpp"
#include "bregcr/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bregcr {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double log_choose(double n, double k) { return log_gamma(n + 1.0) - log_gamma(k + 1.0) - log_gamma(n - k + 1.0); }

double log_factorial(long k) { return log_gamma(static_cast<double>(k) + 1.0); }

double poisson_pmf(double mean, long y) {
    if (y < 0) return 0.0;
    if (mean == 0.0) return y == 0 ? 1.0 : 0.0;
    return std::exp(static_cast<double>(y) * std::log(mean) - mean - log_factorial(y));
}

double binomial_pmf(int n, double p, long y) {
    if (y < 0 || y > n) return 0.0;
    if (p == 0.0) return y == 0 ? 1.0 : 0.0;
    if (p == 1.0) return y == n ? 1.0 : 0.0;
    const double yy = static_cast<double>(y);
    return std::exp(log_choose(n, yy) + yy * std::log(p) + (n - yy) * std::log1p(-p));
}

void require_input(const Channel& ch, double x) {
    if (!in_input_domain(ch, x)) throw DomainError("channel input outside its domain");
}

long poisson_inversion(double mean, Substream& rng) {
    const double u = rng.uniform();
    double p = std::exp(-mean);
    double cdf = p;
    long k = 0;
    while (u > cdf) {
        ++k;
        p *= mean / static_cast<double>(k);
        cdf += p;
        if (p == 0.0) break;  // u fell in the rounding gap of the cdf
    }
    return k;
}

// Hormann's transformed rejection with squeeze (PTRS), mean >= 10.
long poisson_ptrs(double mean, Substream& rng) {
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = rng.uniform() - 0.5;
        const double v = rng.uniform();
        const double us = 0.5 - std::abs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<long>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        const long k = static_cast<long>(kf);
        if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
            -mean + static_cast<double>(k) * loglam - log_factorial(k))
            return k;
    }
}

long binomial_inversion(int n, double p, Substream& rng) {
    const double q = 1.0 - p;
    const double s = p / q;
    const double a = (n + 1) * s;
    const double r0 = std::exp(n * std::log1p(-p));
    for (;;) {
        double r = r0;
        double u = rng.uniform();
        long x = 0;
        while (u > r) {
            u -= r;
            ++x;
            if (x > n) break;
            r *= a / static_cast<double>(x) - s;
        }
        if (x <= n) return x;
    }
}

// Hormann's BTRS, n p >= 10 and p <= 1/2.
long binomial_btrs(int n, double p, Substream& rng) {
    const double spq = std::sqrt(n * p * (1.0 - p));
    const double b = 1.15 + 2.53 * spq;
    const double a = -0.0873 + 0.0248 * b + 0.01 * p;
    const double c = n * p + 0.5;
    const double vr = 0.92 - 4.2 / b;
    const double alpha = (2.83 + 5.1 / b) * spq;
    const double lpq = std::log(p / (1.0 - p));
    const double m = std::floor((n + 1) * p);
    const double h = log_gamma(m + 1.0) + log_gamma(n - m + 1.0);
    for (;;) {
        const double u = rng.uniform() - 0.5;
        double v = rng.uniform();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + c);
        if (k < 0.0 || k > n) continue;
        if (us >= 0.07 && v <= vr) return static_cast<long>(k);
        v = std::log(v * alpha / (a / (us * us) + b));
        if (v <= h - log_gamma(k + 1.0) - log_gamma(n - k + 1.0) + (k - m) * lpq) return static_cast<long>(k);
    }
}

// Integral of h(x) P(y | x) f(x) up to a constant shared by every h; the
// constant-free kernel keeps large y from overflowing.
double posterior_integral(const Prior& prior, const Channel& ch, long y, const Integrand& h) {
    QuadOptions opt;
    opt.rel_tol = 1e-12;
    const double yy = static_cast<double>(y);
    if (const auto* g = std::get_if<GammaPrior>(&prior)) {
        const auto& pc = std::get<PoissonChannel>(ch);
        // x^(p-1) e^(-r x)
        const double p = g->theta + yy;
        const double r = g->alpha + pc.a;
        if (p < 1.5) {
            return integrate_power_kernel([&](double x) { return std::exp(-r * x) * h(x); }, p, 1.0 / r, opt).value;
        }
        const double mode = (p - 1.0) / r;
        auto f = [&](double x) {
            if (x == 0.0) return 0.0;
            return std::exp((p - 1.0) * std::log(x / mode) - r * (x - mode)) * h(x);
        };
        const double width = std::sqrt(p) / r;
        return integrate(f, 0.0, mode, opt).value + integrate_to_infinity(f, mode, width, opt).value;
    }
    const auto& b = std::get<BetaPrior>(prior);
    if (const auto* bc = std::get_if<BinomialChannel>(&ch)) {
        const double rest = static_cast<double>(bc->n - y);
        const double a = bc->a;
        return integrate_beta_kernel([&](double x) { return std::pow(1.0 - a * x, rest) * h(x); }, b.alpha + yy, b.beta, opt)
            .value;
    }
    const double a = std::get<PoissonChannel>(ch).a;
    return integrate_beta_kernel([&](double x) { return std::exp(-a * x) * h(x); }, b.alpha + yy, b.beta, opt).value;
}

void check_pair(const Prior& prior, const Channel& ch) {
    validate(prior);
    validate(ch);
    if (std::holds_alternative<GammaPrior>(prior) && std::holds_alternative<BinomialChannel>(ch))
        throw DomainError("gamma prior cannot feed a binomial channel (unbounded input)");
}

}  // namespace

PoissonChannel make_poisson(double a) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw DomainError("Poisson channel needs a >= 0");
    return {a};
}

BinomialChannel make_binomial(int n, double a) {
    if (n < 1) throw DomainError("binomial channel needs n >= 1");
    if (!(a >= 0.0 && a <= 1.0)) throw DomainError("binomial channel needs a in [0, 1]");
    return {n, a};
}

void validate(const Channel& channel) {
    if (const auto* p = std::get_if<PoissonChannel>(&channel)) make_poisson(p->a);
    else {
        const auto& b = std::get<BinomialChannel>(channel);
        make_binomial(b.n, b.a);
    }
}

ChannelKind kind_of(const Channel& channel) {
    return std::holds_alternative<PoissonChannel>(channel) ? ChannelKind::poisson : ChannelKind::binomial;
}

std::string describe(const Channel& channel) {
    std::ostringstream os;
    os.precision(17);
    if (const auto* p = std::get_if<PoissonChannel>(&channel)) os << "Poisson(a=" << p->a << ")";
    else {
        const auto& b = std::get<BinomialChannel>(channel);
        os << "Binomial(n=" << b.n << ", a=" << b.a << ")";
    }
    return os.str();
}

bool in_input_domain(const Channel& channel, double x) {
    if (!(x >= 0.0) || !std::isfinite(x)) return false;
    if (const auto* b = std::get_if<BinomialChannel>(&channel)) return b->a * x <= 1.0;
    return true;
}

double pmf(const PoissonChannel& ch, long y, double x) {
    require_input(ch, x);
    return poisson_pmf(ch.a * x, y);
}

double pmf(const BinomialChannel& ch, long y, double x) {
    require_input(ch, x);
    return binomial_pmf(ch.n, ch.a * x, y);
}

double pmf(const Channel& ch, long y, double x) {
    return std::visit([&](const auto& c) { return pmf(c, y, x); }, ch);
}

long sample_poisson(double mean, Substream& rng) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) throw DomainError("Poisson mean must be finite and non-negative");
    if (mean == 0.0) return 0;
    return mean < 10.0 ? poisson_inversion(mean, rng) : poisson_ptrs(mean, rng);
}

long sample_binomial(int n, double p, Substream& rng) {
    if (n < 0 || !(p >= 0.0 && p <= 1.0)) throw DomainError("binomial parameters out of range");
    if (p == 0.0 || n == 0) return 0;
    if (p == 1.0) return n;
    if (p > 0.5) return n - sample_binomial(n, 1.0 - p, rng);
    return n * p < 10.0 ? binomial_inversion(n, p, rng) : binomial_btrs(n, p, rng);
}

long sample(const Channel& ch, double x, Substream& rng) {
    require_input(ch, x);
    if (const auto* p = std::get_if<PoissonChannel>(&ch)) return sample_poisson(p->a * x, rng);
    const auto& b = std::get<BinomialChannel>(ch);
    return sample_binomial(b.n, b.a * x, rng);
}

long sample(const Channel& ch, double x, std::uint64_t seed) {
    Substream rng(seed, 0);
    return sample(ch, x, rng);
}

double conditional_moment(const Channel& ch, int m, double x) {
    if (m < 0 || m > 6) throw UnsupportedError("conditional moments are available for 0 <= m <= 6");
    require_input(ch, x);
    const bool binomial = std::holds_alternative<BinomialChannel>(ch);
    const double ax = binomial ? std::get<BinomialChannel>(ch).a * x : std::get<PoissonChannel>(ch).a * x;
    double sum = 0.0;
    double power = 1.0;
    for (int k = 0; k <= m; ++k) {
        const double ff = binomial ? falling_factorial(std::get<BinomialChannel>(ch).n, k) : 1.0;
        sum += stirling2_real(m, k) * ff * power;
        power *= ax;
    }
    return sum;
}

double score_x(const Channel& ch, long y, double x) {
    require_input(ch, x);
    if (!(x > 0.0)) throw DomainError("channel score needs x > 0");
    const double yy = static_cast<double>(y);
    if (const auto* p = std::get_if<PoissonChannel>(&ch)) return yy / x - p->a;
    const auto& b = std::get<BinomialChannel>(ch);
    if (!(b.a * x < 1.0)) throw DomainError("channel score needs a x < 1");
    return yy / x - b.a * (b.n - yy) / (1.0 - b.a * x);
}

double marginal_pmf(const Prior& prior, const Channel& ch, long y) {
    check_pair(prior, ch);
    if (y < 0) return 0.0;
    const double yy = static_cast<double>(y);
    if (const auto* g = std::get_if<GammaPrior>(&prior)) {
        const double a = std::get<PoissonChannel>(ch).a;
        if (a == 0.0) return y == 0 ? 1.0 : 0.0;
        const double s = g->alpha + a;
        return std::exp(log_gamma(g->theta + yy) - log_gamma(g->theta) - log_factorial(y) +
                        g->theta * std::log(g->alpha / s) + yy * std::log(a / s));
    }
    const auto& b = std::get<BetaPrior>(prior);
    const auto* bc = std::get_if<BinomialChannel>(&ch);
    if (!bc) return marginal_pmf_quadrature(prior, ch, y);
    if (y > bc->n) return 0.0;
    const double a = bc->a;
    if (a == 0.0) return y == 0 ? 1.0 : 0.0;
    // (1 - a x)^(n-y) = sum_j C(n-y, j) (1-a)^(n-y-j) a^j (1-x)^j turns the
    // marginal into a sum of positive beta-function terms.
    const int rest = bc->n - static_cast<int>(y);
    const double lead = log_choose(bc->n, yy) + yy * std::log(a) - log_beta(b.alpha, b.beta);
    std::vector<double> logs;
    logs.reserve(static_cast<std::size_t>(rest) + 1);
    for (int j = 0; j <= rest; ++j) {
        if (a == 1.0 && j != rest) continue;
        const double tail = (a == 1.0) ? 0.0 : (rest - j) * std::log1p(-a);
        logs.push_back(log_choose(rest, j) + tail + j * std::log(a) + log_beta(b.alpha + yy, b.beta + j));
    }
    const double top = *std::max_element(logs.begin(), logs.end());
    double sum = 0.0;
    for (double l : logs) sum += std::exp(l - top);
    return std::exp(lead + top) * sum;
}

double marginal_pmf_hypergeometric(const BetaPrior& prior, const BinomialChannel& ch, long y) {
    check_pair(prior, ch);
    if (y < 0 || y > ch.n) return 0.0;
    const double yy = static_cast<double>(y);
    if (ch.a == 0.0) return y == 0 ? 1.0 : 0.0;
    const double lead = log_choose(ch.n, yy) + yy * std::log(ch.a) + log_beta(prior.alpha + yy, prior.beta) -
                        log_beta(prior.alpha, prior.beta);
    return std::exp(lead) * gauss_2f1(yy - ch.n, prior.alpha + yy, prior.alpha + prior.beta + yy, ch.a);
}

double marginal_pmf_quadrature(const Prior& prior, const Channel& ch, long y) {
    check_pair(prior, ch);
    if (y < 0) return 0.0;
    if (const auto* bc = std::get_if<BinomialChannel>(&ch); bc && y > bc->n) return 0.0;
    QuadOptions opt;
    opt.rel_tol = 1e-12;
    if (const auto* g = std::get_if<GammaPrior>(&prior)) {
        const double yy = static_cast<double>(y);
        const double a = std::get<PoissonChannel>(ch).a;
        if (a == 0.0) return y == 0 ? 1.0 : 0.0;
        // posterior_integral rescales x^(p-1) e^(-r x) by its value at the mode once p >= 1.5.
        const double p = g->theta + yy;
        const double r = g->alpha + a;
        double lc = g->theta * std::log(g->alpha) - log_gamma(g->theta) - log_factorial(y) + yy * std::log(a);
        if (p >= 1.5) {
            const double mode = (p - 1.0) / r;
            lc += (p - 1.0) * std::log(mode) - r * mode;
        }
        return std::exp(lc) * posterior_integral(prior, ch, y, [](double) { return 1.0; });
    }
    const auto& b = std::get<BetaPrior>(prior);
    const double yy = static_cast<double>(y);
    const double lb = log_beta(b.alpha, b.beta);
    if (const auto* bc = std::get_if<BinomialChannel>(&ch)) {
        if (bc->a == 0.0) return y == 0 ? 1.0 : 0.0;
        const double lc = log_choose(bc->n, yy) + yy * std::log(bc->a) - lb;
        const double rest = static_cast<double>(bc->n - y);
        return std::exp(lc) *
               integrate_beta_kernel([&](double x) { return std::pow(1.0 - bc->a * x, rest); }, b.alpha + yy, b.beta, opt)
                   .value;
    }
    const double a = std::get<PoissonChannel>(ch).a;
    if (a == 0.0) return y == 0 ? 1.0 : 0.0;
    const double lc = yy * std::log(a) - log_factorial(y) - lb;
    return std::exp(lc) *
           integrate_beta_kernel([&](double x) { return std::exp(-a * x); }, b.alpha + yy, b.beta, opt).value;
}

MarginalLaw marginal_law(const Prior& prior, const Channel& ch, double tail_tol) {
    check_pair(prior, ch);
    if (!(tail_tol > 0.0)) throw DomainError("tail tolerance must be positive");
    MarginalLaw law;
    if (const auto* bc = std::get_if<BinomialChannel>(&ch)) {
        for (long y = 0; y <= bc->n; ++y) law.pmf.push_back(marginal_pmf(prior, ch, y));
        return law;
    }
    const double a = std::get<PoissonChannel>(ch).a;
    if (a == 0.0) {
        law.pmf = {1.0};
        return law;
    }
    const long cap = 10000000;
    if (const auto* g = std::get_if<GammaPrior>(&prior)) {
        // Consecutive-term ratio (theta + y)/(y + 1) * q with q = a/(alpha + a)
        // is monotone in y and tends to q < 1, so past y the tail is at most
        // P(y) * rmax / (1 - rmax) with rmax = max(ratio(y), q).
        const double q = a / (g->alpha + a);
        for (long y = 0; y < cap; ++y) {
            const double p = marginal_pmf(prior, ch, y);
            law.pmf.push_back(p);
            const double ratio = (g->theta + static_cast<double>(y)) / static_cast<double>(y + 1) * q;
            const double rmax = std::max(ratio, q);
            if (static_cast<double>(y) > g->theta / g->alpha * a && rmax < 1.0) {
                const double tail = p * rmax / (1.0 - rmax);
                if (tail < tail_tol) {
                    law.tail_bound = tail;
                    return law;
                }
            }
        }
        throw NonConvergenceError("marginal law: tail did not fall below tolerance");
    }
    // Beta input lives in [0, 1], so the Poisson tail at mean a dominates.
    for (long y = 0; y < cap; ++y) {
        law.pmf.push_back(marginal_pmf(prior, ch, y));
        const double k = static_cast<double>(y + 1);
        if (k > a) {
            const double tail = poisson_pmf(a, y + 1) / (1.0 - a / (k + 1.0));
            if (tail < tail_tol) {
                law.tail_bound = tail;
                return law;
            }
        }
    }
    throw NonConvergenceError("marginal law: tail did not fall below tolerance");
}

double posterior_mean(const Prior& prior, const Channel& ch, long y, PosteriorMode mode) {
    check_pair(prior, ch);
    if (y < 0) throw DomainError("posterior mean needs y >= 0");
    if (const auto* bc = std::get_if<BinomialChannel>(&ch); bc && y > bc->n)
        throw DomainError("posterior mean needs y <= n");
    if (mode == PosteriorMode::closed_form) {
        if (const auto* g = std::get_if<GammaPrior>(&prior)) {
            const double a = std::get<PoissonChannel>(ch).a;
            return (static_cast<double>(y) + g->theta) / (g->alpha + a);
        }
        if (std::holds_alternative<PoissonChannel>(ch))
            throw UnsupportedError("no closed-form posterior mean for a beta prior with a Poisson channel");
        const auto lc = lmmse_coefficients(prior, ch);
        return lc.c * static_cast<double>(y) + lc.d;
    }
    const double num = posterior_integral(prior, ch, y, [](double x) { return x; });
    const double den = posterior_integral(prior, ch, y, [](double) { return 1.0; });
    if (!(den > 0.0)) throw NonConvergenceError("posterior mean: vanishing evidence");
    return num / den;
}

LinearCoefficients lmmse_coefficients(const Prior& prior, const Channel& ch, MomentMode mode) {
    check_pair(prior, ch);
    const double ex = mean(prior);
    const double v = variance(prior);
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("linear MMSE needs a finite positive prior variance");
    if (const auto* pc = std::get_if<PoissonChannel>(&ch)) {
        const double den = pc->a * v + ex;
        return {v / den, ex * ex / den};
    }
    const auto& bc = std::get<BinomialChannel>(ch);
    if (bc.a == 0.0) return {0.0, ex};
    const double ex2 = moment(prior, 2.0, mode);
    const double na = bc.n * bc.a;
    const double ey = na * (ex - bc.a * ex2);  // E[n a X (1 - a X)]
    const double den = ey + na * na * v;
    return {na * v / den, ey * ex / den};
}

LinearityConstant linearity_constant(const GammaPrior& prior, const PoissonChannel& ch, int n_max) {
    if (n_max < 0) throw DomainError("linearity constant needs n_max >= 0");
    make_gamma(prior.alpha, prior.theta);
    make_poisson(ch.a);
    LinearityConstant out;
    for (int n = 0; n <= n_max; ++n) {
        const double r = (prior.theta + n) / ((n + 1.0) * (prior.alpha + ch.a));
        out.value = std::max(out.value, r);
    }
    out.monotone_certified = prior.theta >= 1.0;
    return out;
}

}  // namespace bregcr
