#include "bregcr/bounds.hpp"

#include "bregcr/errors.hpp"
#include "bregcr/specfun.hpp"
#include "parallel.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace bregcr {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// Sum of coefficient * moment where a zero coefficient never touches its
// moment, so 0 * inf does not poison the total.
struct TermSum {
    double total = 0.0;
    bool infinite = false;
    void add(double coef, double value) {
        if (coef == 0.0) return;
        if (!std::isfinite(value)) {
            infinite = true;
            return;
        }
        total += coef * value;
    }
};

double hyp_moment(const BetaPrior& p, double k, double m, double a) {
    try {
        return hypergeometric_moment(p, k, m, a);
    } catch (const MomentDivergenceError&) {
        return inf;
    }
}

bool check_regularity(const Prior& prior, ChannelKind channel, BoundValue& b) {
    const RegularityReport rep = regularity_check(prior, channel);
    if (rep.support_warning) b.assumptions.emplace_back("support-mismatch");
    if (rep.holds) return true;
    b.assumptions.emplace_back("regularity");
    b.assumptions.insert(b.assumptions.end(), rep.reasons.begin(), rep.reasons.end());
    b.valid = false;
    b.value = 0.0;
    return false;
}

BoundValue finish(BoundValue b, const TermSum& denom) {
    if (denom.infinite) {
        b.assumptions.emplace_back("moment-infinite");
        b.value = 0.0;
        b.valid = true;
    } else if (!(denom.total > 0.0)) {
        b.assumptions.emplace_back("negative-denominator");
        b.value = 0.0;
        b.valid = false;
    } else {
        b.value = 1.0 / denom.total;
        b.valid = true;
    }
    return b;
}

struct Weights {
    double x;
    double g;
};

Weights poisson_weights(DeltaArgumentOrder order) {
    return order == DeltaArgumentOrder::printed ? Weights{4.0 / 3.0, 2.0 / 3.0} : Weights{2.0 / 3.0, 4.0 / 3.0};
}

std::string suffix(DeltaArgumentOrder order) { return order == DeltaArgumentOrder::printed ? "" : "-swapped"; }

std::string sample_context(std::size_t i, double x, long y, double g) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "sample " << i << " (x = " << x << ", y = " << y << ", g(y) = " << g << "): ";
    return msg.str();
}

}  // namespace

double joint_score(const Prior& prior, const Channel& ch, double x, long y, ScoreMode mode) {
    const double rho = score(prior, x, mode);
    const double yd = static_cast<double>(y);
    if (const auto* pc = std::get_if<PoissonChannel>(&ch)) return yd / x - pc->a + rho;
    const auto& bc = std::get<BinomialChannel>(ch);
    return (yd - bc.n * bc.a * x) / (x * (1.0 - bc.a * x)) + rho;
}

BoundValue classic_cr_mmse(const Prior& prior, const Channel& ch, ScoreMode score, BinomialFisherTerm term) {
    validate(prior);
    validate(ch);
    BoundValue b;
    TermSum d;
    if (const auto* pc = std::get_if<PoissonChannel>(&ch)) {
        b.formula = "classic-cr-poisson";
        if (!check_regularity(prior, ChannelKind::poisson, b)) return b;
        d.add(pc->a, moment(prior, -1.0));
    } else {
        const auto& bc = std::get<BinomialChannel>(ch);
        const auto* beta = std::get_if<BetaPrior>(&prior);
        if (!beta) throw DomainError("a binomial channel needs a beta prior");
        b.formula = term == BinomialFisherTerm::conditional_variance ? "classic-cr-binomial"
                                                                     : "classic-cr-binomial-inverse-mean";
        if (!check_regularity(prior, ChannelKind::binomial, b)) return b;
        const double fisher = term == BinomialFisherTerm::conditional_variance ? hyp_moment(*beta, -1.0, 1.0, bc.a)
                                                                               : moment(prior, -1.0);
        d.add(bc.n * bc.a, fisher);
    }
    d.add(1.0, score_weighted_moment(prior, 0.0, score));
    return finish(std::move(b), d);
}

BoundValue cr_linear_poisson(const Prior& prior, const PoissonChannel& ch, double c1, double c2,
                             DeltaArgumentOrder order) {
    validate(prior);
    validate(Channel{ch});
    if (!(c1 >= 0.0 && c2 >= 0.0)) throw DomainError("cr_linear_poisson needs c1, c2 >= 0");
    BoundValue b;
    b.formula = "cr-linear-poisson" + suffix(order);
    if (!check_regularity(prior, ChannelKind::poisson, b)) return b;
    const double a = ch.a;
    const double inv = moment(prior, -1.0);
    const double rho2 = score_weighted_moment(prior, 0.0);
    const double rho2x = score_weighted_moment(prior, 1.0);
    const Weights w = poisson_weights(order);

    // E[s^2 X], E[s^2 Y] and E[s^2] for s = Y/X - a + rho.
    TermSum d;
    d.add(w.x * a, 1.0);
    d.add(w.x, rho2x);
    const double wy = w.g * c1;
    d.add(wy * a * a, 1.0);
    d.add(wy * a, inv);
    d.add(wy * a, rho2x);
    const double w0 = w.g * c2;
    d.add(w0 * a, inv);
    d.add(w0, rho2);
    return finish(std::move(b), d);
}

BoundValue universal_cr_poisson(const GammaPrior& prior, const PoissonChannel& ch, DeltaArgumentOrder order) {
    const LinearityConstant lc = linearity_constant(prior, ch, 1000);
    if (!lc.monotone_certified) {
        BoundValue b;
        b.formula = "universal-cr-poisson" + suffix(order);
        if (!check_regularity(prior, ChannelKind::poisson, b)) return b;
        throw DomainError("linearity constant is not certified for theta < 1");
    }
    BoundValue b = cr_linear_poisson(prior, ch, lc.value, lc.value, order);
    b.formula = "universal-cr-poisson" + suffix(order);
    return b;
}

double g_function(const BetaPrior& prior, const BinomialChannel& ch, int r, int m, ScoreMode score) {
    validate(prior);
    validate(Channel{ch});
    if (r < 0 || r > 2 || m < 0 || m > 2) throw DomainError("g_function needs r, m in 0..2");
    const double n = ch.n;
    const double a = ch.a;
    auto ff = [&](int k) { return falling_factorial(n, k); };
    auto st = [](int mm, int k) { return k < 0 ? 0.0 : stirling2_real(mm, k); };

    TermSum g;
    for (int k = 0; k <= m + 2; ++k) {
        const double d = n * n * ff(k - 2) * st(m, k - 2) - 2.0 * n * ff(k - 1) * st(m + 1, k - 1) +
                         ff(k) * st(m + 2, k);
        if (d != 0.0) g.add(d * std::pow(a, k), hyp_moment(prior, k + r - 2, 2.0, a));
    }
    for (int k = 0; k <= m; ++k) {
        const double c = st(m, k) * ff(k) * std::pow(a, k);
        if (c != 0.0) g.add(c, score_weighted_moment(prior, k + r, score));
    }
    // The cross term 2 E[rho w(X)] is integrated by parts into -2 E[w'(X)].
    for (int k = 0; k <= m + 1; ++k) {
        const double h = n * ff(k - 1) * st(m, k - 1) - ff(k) * st(m + 1, k);
        if (h == 0.0) continue;
        g.add(2.0 * h * std::pow(a, k + 1), hyp_moment(prior, k + r - 1, 2.0, a));
        const double j = k + r - 1;
        if (j != 0.0) g.add(2.0 * h * std::pow(a, k) * j, hyp_moment(prior, k + r - 2, 1.0, a));
    }
    return g.infinite ? inf : g.total;
}

KappaTable kappa_table(double c1, double c2, KappaSigns signs, DeltaArgumentOrder order) {
    KappaTable k{};
    if (order == DeltaArgumentOrder::printed) {
        // 4X/3 + 2g/3 - X^2 - 2Xg/3 - g^2/3 at g = c1 Y + c2.
        k[0][2] = -c1 * c1 / 3.0;
        k[0][1] = 2.0 * c1 * (1.0 - c2) / 3.0;
        k[1][1] = -2.0 * c1 / 3.0;
        k[2][0] = -1.0;
        k[1][0] = 2.0 * (2.0 - c2) / 3.0;
        k[0][0] = (2.0 * c2 - c2 * c2) / 3.0;
    } else {
        // 4g/3 + 2X/3 - g^2 - 2Xg/3 - X^2/3.
        k[0][2] = -c1 * c1;
        k[0][1] = 2.0 * c1 * (2.0 - 3.0 * c2) / 3.0;
        k[1][1] = -2.0 * c1 / 3.0;
        k[2][0] = -1.0 / 3.0;
        k[1][0] = 2.0 * (1.0 - c2) / 3.0;
        k[0][0] = (4.0 * c2 - 3.0 * c2 * c2) / 3.0;
    }
    if (signs == KappaSigns::as_printed) {
        k[0][2] = std::abs(k[0][2]);
        k[1][1] = std::abs(k[1][1]);
    }
    return k;
}

BoundValue cr_linear_binomial(const BetaPrior& prior, const BinomialChannel& ch, double c1, double c2,
                              const BinomialBoundOptions& opt) {
    BoundValue b;
    b.formula = "cr-linear-binomial" + suffix(opt.order);
    if (opt.signs == KappaSigns::as_printed) b.formula += "-printed-signs";
    if (!check_regularity(Prior{prior}, ChannelKind::binomial, b)) return b;
    const KappaTable k = kappa_table(c1, c2, opt.signs, opt.order);
    TermSum d;
    for (int r = 0; r <= 2; ++r)
        for (int m = 0; m <= 2; ++m)
            if (k[r][m] != 0.0) d.add(k[r][m], g_function(prior, ch, r, m, opt.score));
    return finish(std::move(b), d);
}

BoundValue universal_cr_binomial(const BetaPrior& prior, const BinomialChannel& ch, ScoreMode score,
                                 DeltaArgumentOrder order) {
    validate(Prior{prior});
    validate(Channel{ch});
    BoundValue b;
    b.formula = "universal-cr-binomial" + suffix(order);
    if (!check_regularity(Prior{prior}, ChannelKind::binomial, b)) return b;
    const std::array<double, 3> c = order == DeltaArgumentOrder::printed
                                        ? std::array<double, 3>{2.0 / 3.0, 4.0 / 3.0, -1.0}
                                        : std::array<double, 3>{4.0 / 9.0, 2.0 / 9.0, -2.0 / 9.0};
    TermSum d;
    for (int k = 0; k <= 2; ++k) {
        d.add(c[k] * ch.n * ch.a, hyp_moment(prior, k - 1.0, 1.0, ch.a));
        d.add(c[k], score_weighted_moment(prior, k, score));
    }
    return finish(std::move(b), d);
}

RiskEstimate variational_bound(const Generator& gen, const Prior& prior, const Channel& ch, const EstimatorSpec& est,
                               const PsiFunction& psi, std::size_t n, std::uint64_t seed) {
    if (n < 100) throw DomainError("variational bound needs at least 100 samples");
    if (gen.dimension() != 1) throw DomainError("variational bound is defined for scalar generators");
    const std::vector<Draw> draws = draw_joint(prior, ch, n, seed);
    const std::vector<double> table = estimate_table(est, prior, ch, draws);
    std::vector<double> num(n), den(n);
    detail::for_each_index(n, true, [&](std::size_t i) {
        const double x = draws[i].x;
        const double g = table[static_cast<std::size_t>(draws[i].y)];
        try {
            const double p = psi(x, draws[i].y);
            num[i] = (x - g) * p;
            den[i] = p == 0.0 ? 0.0 : p * p / delta_weight(gen, x, g);
            if (!std::isfinite(num[i]) || !std::isfinite(den[i])) throw DomainError("non-finite term");
        } catch (const Error& e) {
            throw DomainError(sample_context(i, x, draws[i].y, g) + e.what());
        }
    });
    const RiskEstimate nm = summarize(num, seed);
    const RiskEstimate dm = summarize(den, seed);
    if (!(dm.mean > 0.0)) throw DomainError("variational bound: the denominator E[psi^2 / Delta] vanishes");
    const double ratio = nm.mean / dm.mean;
    // Linearisation of N^2 / D around the sample means; its mean is the ratio.
    std::vector<double> z(n);
    detail::for_each_index(n, true, [&](std::size_t i) { z[i] = 2.0 * ratio * num[i] - ratio * ratio * den[i]; });
    RiskEstimate out = summarize(z, seed);
    out.mean = nm.mean * ratio;
    return out;
}

BoundValue generalized_cr_monte_carlo(const Generator& gen, const Prior& prior, const Channel& ch,
                                      const EstimatorSpec& est, std::size_t n, std::uint64_t seed, ScoreMode score) {
    if (n < 100) throw DomainError("generalized CR needs at least 100 samples");
    if (gen.dimension() != 1) throw DomainError("generalized CR is defined for scalar generators");
    validate(prior);
    validate(ch);
    BoundValue b;
    b.formula = "generalized-cr-monte-carlo";
    if (!check_regularity(prior, kind_of(ch), b)) return b;
    const std::vector<Draw> draws = draw_joint(prior, ch, n, seed);
    const std::vector<double> table = estimate_table(est, prior, ch, draws);
    std::vector<double> w(n);
    detail::for_each_index(n, true, [&](std::size_t i) {
        const double x = draws[i].x;
        const double g = table[static_cast<std::size_t>(draws[i].y)];
        try {
            const double s = joint_score(prior, ch, x, draws[i].y, score);
            w[i] = s * s / delta_weight(gen, x, g);
            if (!std::isfinite(w[i])) throw DomainError("non-finite weighted score");
        } catch (const Error& e) {
            throw DomainError(sample_context(i, x, draws[i].y, g) + e.what());
        }
    });
    const RiskEstimate fisher = summarize(w, seed);
    if (!(fisher.mean > 0.0)) throw DomainError("generalized CR: weighted Fisher term vanishes");
    b.value = 1.0 / fisher.mean;
    b.std_error = fisher.std_error / (fisher.mean * fisher.mean);
    b.valid = true;
    return b;
}

}  // namespace bregcr
