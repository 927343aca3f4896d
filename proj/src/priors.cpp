#include "bregcr/priors.hpp"

#include "bregcr/errors.hpp"
#include "bregcr/specfun.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <sstream>

namespace bregcr {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

bool positive_finite(double x) { return x > 0.0 && std::isfinite(x); }

// sum of coef_i * value_i, where a value may be +inf; terms with a zero
// coefficient are dropped so that 0 * inf never arises.
double combine_terms(std::initializer_list<std::pair<double, double>> terms) {
    double total = 0.0;
    for (auto [coef, value] : terms) {
        if (coef == 0.0) continue;
        if (std::isinf(value)) return inf;
        total += coef * value;
    }
    return total;
}

double gamma_unit_rate(double shape, Substream& rng) {
    // Marsaglia-Tsang squeeze/rejection; shapes below 1 are boosted through
    // G(shape) = G(shape + 1) U^(1/shape).
    if (shape < 1.0) {
        const double g = gamma_unit_rate(shape + 1.0, rng);
        return g * std::exp(std::log(rng.uniform()) / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

}  // namespace

GammaPrior make_gamma(double alpha, double theta) {
    if (!positive_finite(alpha) || !positive_finite(theta))
        throw DomainError("gamma prior needs alpha > 0 and theta > 0");
    return {alpha, theta};
}

BetaPrior make_beta(double alpha, double beta) {
    if (!positive_finite(alpha) || !positive_finite(beta))
        throw DomainError("beta prior needs alpha > 0 and beta > 0");
    return {alpha, beta};
}

void validate(const Prior& prior) {
    std::visit([](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GammaPrior>) make_gamma(p.alpha, p.theta);
        else make_beta(p.alpha, p.beta);
    }, prior);
}

std::string describe(const Prior& prior) {
    std::ostringstream os;
    os.precision(17);
    if (const auto* g = std::get_if<GammaPrior>(&prior)) os << "Gamma(alpha=" << g->alpha << ", theta=" << g->theta << ")";
    else {
        const auto& b = std::get<BetaPrior>(prior);
        os << "Beta(alpha=" << b.alpha << ", beta=" << b.beta << ")";
    }
    return os.str();
}

double pdf(const GammaPrior& p, double x) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("gamma pdf: x outside [0, inf)");
    if (x == 0.0) {
        if (p.theta < 1.0) return inf;
        return p.theta == 1.0 ? p.alpha : 0.0;
    }
    return std::exp(p.theta * std::log(p.alpha) + (p.theta - 1.0) * std::log(x) - p.alpha * x - log_gamma(p.theta));
}

double pdf(const BetaPrior& p, double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("beta pdf: x outside [0, 1]");
    const double lb = log_beta(p.alpha, p.beta);
    if (x == 0.0) {
        if (p.alpha < 1.0) return inf;
        return p.alpha == 1.0 ? std::exp(-lb) : 0.0;
    }
    if (x == 1.0) {
        if (p.beta < 1.0) return inf;
        return p.beta == 1.0 ? std::exp(-lb) : 0.0;
    }
    return std::exp((p.alpha - 1.0) * std::log(x) + (p.beta - 1.0) * std::log1p(-x) - lb);
}

double pdf(const Prior& p, double x) {
    return std::visit([x](const auto& q) { return pdf(q, x); }, p);
}

double cdf(const Prior& prior, double x) {
    if (std::isnan(x)) throw DomainError("cdf: NaN argument");
    if (const auto* g = std::get_if<GammaPrior>(&prior)) {
        if (x <= 0.0) return 0.0;
        if (std::isinf(x)) return 1.0;
        return boost::math::gamma_p(g->theta, g->alpha * x);
    }
    const auto& b = std::get<BetaPrior>(prior);
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return boost::math::ibeta(b.alpha, b.beta, x);
}

double mean(const Prior& prior) {
    if (const auto* g = std::get_if<GammaPrior>(&prior)) return g->theta / g->alpha;
    const auto& b = std::get<BetaPrior>(prior);
    return b.alpha / (b.alpha + b.beta);
}

double variance(const Prior& prior) {
    if (const auto* g = std::get_if<GammaPrior>(&prior)) return g->theta / (g->alpha * g->alpha);
    const auto& b = std::get<BetaPrior>(prior);
    const double s = b.alpha + b.beta;
    return b.alpha * b.beta / (s * s * (s + 1.0));
}

double sample(const GammaPrior& p, Substream& rng) { return gamma_unit_rate(p.theta, rng) / p.alpha; }

double sample(const BetaPrior& p, Substream& rng) {
    for (;;) {
        const double x = gamma_unit_rate(p.alpha, rng);
        const double y = gamma_unit_rate(p.beta, rng);
        if (x + y > 0.0) return x / (x + y);
    }
}

double sample(const Prior& p, Substream& rng) {
    return std::visit([&rng](const auto& q) { return sample(q, rng); }, p);
}

std::vector<double> sample(const Prior& p, std::size_t count, std::uint64_t seed) {
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        Substream rng(seed, i);
        out[i] = sample(p, rng);
    }
    return out;
}

double moment(const GammaPrior& p, double k) {
    if (std::isnan(k)) throw DomainError("moment: NaN order");
    if (k == 0.0) return 1.0;
    if (p.theta + k <= 0.0) return inf;
    return std::exp(log_gamma(p.theta + k) - log_gamma(p.theta) - k * std::log(p.alpha));
}

double beta_mixed_moment(const BetaPrior& p, double j, double l) {
    if (std::isnan(j) || std::isnan(l)) throw DomainError("moment: NaN order");
    if (j == 0.0 && l == 0.0) return 1.0;
    if (p.alpha + j <= 0.0 || p.beta + l <= 0.0) return inf;
    return std::exp(log_beta(p.alpha + j, p.beta + l) - log_beta(p.alpha, p.beta));
}

double moment(const BetaPrior& p, double k, MomentMode mode) {
    if (mode == MomentMode::paper_verbatim && k == 2.0) {
        const double s = p.alpha + p.beta;
        return (p.alpha + 2.0) * (p.alpha + 1.0) / ((s + 2.0) * (s + 1.0));
    }
    return beta_mixed_moment(p, k, 0.0);
}

double moment(const Prior& p, double k, MomentMode mode) {
    if (const auto* g = std::get_if<GammaPrior>(&p)) return moment(*g, k);
    return moment(std::get<BetaPrior>(p), k, mode);
}

double score(const GammaPrior& p, double x) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("gamma score needs x > 0");
    return (p.theta - 1.0) / x - p.alpha;
}

double score(const BetaPrior& p, double x, ScoreMode mode) {
    if (!(x > 0.0 && x < 1.0)) throw DomainError("beta score needs x in (0, 1)");
    const double right = mode == ScoreMode::corrected ? p.beta - 1.0 : 1.0 - p.beta;
    return (p.alpha - 1.0) / x - right / (1.0 - x);
}

double score(const Prior& p, double x, ScoreMode mode) {
    if (const auto* g = std::get_if<GammaPrior>(&p)) return score(*g, x);
    return score(std::get<BetaPrior>(p), x, mode);
}

double score_weighted_moment(const GammaPrior& p, double k) {
    // rho^2 = (theta-1)^2 / x^2 - 2 alpha (theta-1) / x + alpha^2
    const double t1 = p.theta - 1.0;
    return combine_terms({{t1 * t1, moment(p, k - 2.0)},
                          {-2.0 * p.alpha * t1, moment(p, k - 1.0)},
                          {p.alpha * p.alpha, moment(p, k)}});
}

double score_weighted_moment(const BetaPrior& p, double k, ScoreMode mode) {
    const double a1 = p.alpha - 1.0;
    const double b1 = p.beta - 1.0;
    const double cross = mode == ScoreMode::corrected ? -2.0 * a1 * b1 : 2.0 * a1 * b1;
    return combine_terms({{a1 * a1, beta_mixed_moment(p, k - 2.0, 0.0)},
                          {cross, beta_mixed_moment(p, k - 1.0, -1.0)},
                          {b1 * b1, beta_mixed_moment(p, k, -2.0)}});
}

double score_weighted_moment(const Prior& p, double k, ScoreMode mode) {
    if (const auto* g = std::get_if<GammaPrior>(&p)) return score_weighted_moment(*g, k);
    return score_weighted_moment(std::get<BetaPrior>(p), k, mode);
}

double hypergeometric_moment(const BetaPrior& p, double k, double m, double a) {
    if (std::isnan(k) || std::isnan(m) || !(a >= 0.0 && a <= 1.0))
        throw DomainError("hypergeometric_moment needs a in [0, 1]");
    if (p.alpha + k <= 0.0) throw MomentDivergenceError("hypergeometric_moment: alpha + k must be positive");
    const double base = beta_mixed_moment(p, k, 0.0);
    if (a == 0.0 || m == 0.0) return base;
    return base * gauss_2f1(m, p.alpha + k, p.alpha + p.beta + k, a);
}

double log_moment(const Prior& prior, LogMomentKind kind) {
    if (const auto* g = std::get_if<GammaPrior>(&prior)) {
        if (kind != LogMomentKind::x_log_x) throw UnsupportedError("x-logit moment needs a beta prior");
        return g->theta * (digamma(g->theta + 1.0) - std::log(g->alpha)) / g->alpha;
    }
    const auto& b = std::get<BetaPrior>(prior);
    const double m = b.alpha / (b.alpha + b.beta);
    if (kind == LogMomentKind::x_log_x) return m * (digamma(b.alpha + 1.0) - digamma(b.alpha + b.beta + 1.0));
    return m * (digamma(b.alpha + 1.0) - digamma(b.beta));
}

RegularityReport regularity_check(const Prior& prior, ChannelKind channel) {
    RegularityReport r;
    if (const auto* g = std::get_if<GammaPrior>(&prior)) {
        if (channel == ChannelKind::binomial)
            throw DomainError("gamma prior has unbounded support; a binomial channel needs inputs in [0, 1/a]");
        // lim_{x -> 0+} f(x) = 0 iff theta > 1.
        if (!(g->theta > 1.0)) r.reasons.emplace_back("density-limit-at-0");
    } else {
        const auto& b = std::get<BetaPrior>(prior);
        r.support_warning = channel == ChannelKind::poisson;
        if (!(b.alpha > 1.0)) r.reasons.emplace_back("density-limit-at-0");
        if (!(b.beta > 1.0)) r.reasons.emplace_back("density-limit-at-1");
    }
    r.holds = r.reasons.empty();
    return r;
}

}  // namespace bregcr
