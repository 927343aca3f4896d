#include "bregcr/verify.hpp"

#include "bregcr/bounds.hpp"
#include "bregcr/errors.hpp"
#include "bregcr/oracles.hpp"
#include "bregcr/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

namespace bregcr {

namespace {

namespace orc = oracle;

CheckResult check(std::string suite, std::string name, double observed, double tolerance, std::string detail = {}) {
    return {std::move(suite), std::move(name), observed <= tolerance, observed, tolerance, std::move(detail)};
}

std::string label(const Prior& p) {
    char buf[64];
    if (const auto* g = std::get_if<GammaPrior>(&p)) std::snprintf(buf, sizeof buf, "Gamma(%g, %g)", g->alpha, g->theta);
    else {
        const auto& b = std::get<BetaPrior>(p);
        std::snprintf(buf, sizeof buf, "Beta(%g, %g)", b.alpha, b.beta);
    }
    return buf;
}

std::string label(const Channel& ch) {
    char buf[64];
    if (const auto* pc = std::get_if<PoissonChannel>(&ch)) std::snprintf(buf, sizeof buf, "Poisson(a=%g)", pc->a);
    else {
        const auto& bc = std::get<BinomialChannel>(ch);
        std::snprintf(buf, sizeof buf, "Binomial(n=%d, a=%g)", bc.n, bc.a);
    }
    return buf;
}

double rel_err(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

struct Rng {
    std::mt19937_64 eng;
    explicit Rng(unsigned seed) : eng(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng); }
    double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
};

Point random_interior(const Generator& g, Rng& r) {
    Point p(static_cast<Eigen::Index>(g.dimension()));
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        switch (g.kind()) {
        case GeneratorKind::squared_mahalanobis: p[i] = r.uniform(-5.0, 5.0); break;
        case GeneratorKind::binary_logit: p[i] = r.uniform(1e-4, 1.0 - 1e-4); break;
        default: p[i] = r.log_uniform(1e-3, 1e3); break;
        }
    }
    return p;
}

std::vector<Generator> builtin_generators() {
    Matrix a(3, 3);
    a << 2.0, 0.3, 0.1, 0.3, 1.0, -0.2, 0.1, -0.2, 0.5;
    return {Generator::squared(),      Generator::squared_mahalanobis(a), Generator::neg_entropy(),
            Generator::binary_logit(), Generator::neg_binomial(),         Generator::generalized_i_divergence(3)};
}

double expect(const Prior& p, const orc::Fn& f) {
    if (const auto* g = std::get_if<GammaPrior>(&p)) return orc::gamma_expect(g->alpha, g->theta, f);
    const auto& b = std::get<BetaPrior>(p);
    return orc::beta_expect(b.alpha, b.beta, f);
}

bool interior(const Prior& p, double x) {
    return std::holds_alternative<GammaPrior>(p) ? x > 0.0 : x > 0.0 && x < 1.0;
}

double oracle_log_pdf(const Prior& p, double x) {
    if (const auto* g = std::get_if<GammaPrior>(&p)) return std::log(orc::gamma_pdf(g->alpha, g->theta, x));
    const auto& b = std::get<BetaPrior>(p);
    return std::log(orc::beta_pdf(b.alpha, b.beta, x));
}

double oracle_likelihood(const Channel& ch, long y, double x) {
    if (const auto* pc = std::get_if<PoissonChannel>(&ch)) return orc::poisson_pmf(pc->a * x, y);
    const auto& bc = std::get<BinomialChannel>(ch);
    return orc::binomial_pmf(bc.n, bc.a * x, y);
}

const std::vector<Prior>& test_priors() {
    static const std::vector<Prior> p = {GammaPrior{2.1, 3.0}, GammaPrior{0.7, 4.5}, GammaPrior{5.0, 1.6},
                                         BetaPrior{3.0, 5.0},  BetaPrior{3.0, 2.5},  BetaPrior{1.7, 1.3}};
    return p;
}

}  // namespace

std::vector<CheckResult> verify_divergence(int pairs) {
    std::vector<CheckResult> out;
    Rng rng(2024);
    for (const Generator& g : builtin_generators()) {
        double l2 = 0.0, cosines = 0.0, negative = 0.0;
        for (int i = 0; i < pairs; ++i) {
            const Point u = random_interior(g, rng), v = random_interior(g, rng), w = random_interior(g, rng);
            const double l = bregman(g, u, v);
            negative = std::max(negative, -l);
            if (l > 0.0) l2 = std::max(l2, std::abs(l2_form(g, u, v) - l) / l);
            const double rhs = bregman(g, u, w) + bregman(g, w, v) - (u - w).dot(g.gradient(v) - g.gradient(w));
            const double scale = std::max({1.0, l, bregman(g, u, w), bregman(g, w, v)});
            cosines = std::max(cosines, std::abs(l - rhs) / scale);
        }
        out.push_back(check("divergence", "l2-form " + g.name(), l2, 1e-8, std::to_string(pairs) + " pairs"));
        out.push_back(check("divergence", "law-of-cosines " + g.name(), cosines, 1e-10));
        out.push_back(check("divergence", "non-negative " + g.name(), negative, 0.0));
    }

    // Inverse-weight polynomials bound 1/Delta with the Hessian weight on the
    // polynomial's first argument.
    {
        const Generator g = Generator::neg_entropy();
        double worst = 0.0;
        for (int i = 1; i <= 50; ++i)
            for (int j = 0; j <= 50; ++j) {
                const double u = 0.1 * i, v = 0.1 * j;
                const double inv = 1.0 / delta_weight(g, v, u);
                worst = std::max(worst, (u - inv) / inv);
                const double p = delta_inverse_upper(GeneratorKind::neg_entropy, u, v, DeltaBoundLevel::linear);
                worst = std::max(worst, (inv - p) / p);
            }
        out.push_back(check("divergence", "neg-entropy inverse-weight chain", worst, 1e-12, "(0, 5]^2 grid"));
    }
    {
        const Generator g = Generator::binary_logit();
        double worst = 0.0;
        for (int i = 0; i <= 98; ++i)
            for (int j = 0; j <= 98; ++j) {
                const double u = 0.01 + 0.01 * i, v = 0.01 + 0.01 * j;
                const double inv = 1.0 / delta_weight(g, v, u);
                const double cubic = delta_inverse_upper(GeneratorKind::binary_logit, u, v, DeltaBoundLevel::cubic);
                const double quad = delta_inverse_upper(GeneratorKind::binary_logit, u, v, DeltaBoundLevel::quadratic);
                const double relaxed =
                    delta_inverse_upper(GeneratorKind::binary_logit, u, v, DeltaBoundLevel::quadratic_relaxed);
                worst = std::max({worst, (inv - cubic) / cubic, (cubic - quad) / quad, (quad - relaxed) / relaxed});
            }
        out.push_back(check("divergence", "binary-logit inverse-weight chain", worst, 1e-10, "[0.01, 0.99]^2 grid"));
    }

    // E l(X, g) = E l(X, m) + E l(m, g) with m the posterior mean, on paired draws.
    struct Pair {
        Generator gen;
        Prior prior;
        Channel ch;
        double c, d;
    };
    const Pair cases[] = {
        {Generator::squared(), GammaPrior{2.1, 3.0}, PoissonChannel{1.0}, 0.5, 0.4},
        {Generator::neg_entropy(), GammaPrior{2.1, 3.0}, PoissonChannel{2.0}, 0.3, 0.9},
        {Generator::binary_logit(), BetaPrior{3.0, 5.0}, BinomialChannel{6, 1.0}, 0.05, 0.2},
    };
    for (const Pair& pc : cases) {
        const auto clamp = interior_clamp(pc.gen);
        const EstimatorSpec lin = EstimatorSpec::linear(pc.c, pc.d, clamp);
        const EstimatorSpec pm = EstimatorSpec::posterior_mean(PosteriorMode::closed_form, clamp);
        const RiskEstimate gap = monte_carlo_expectation(pc.prior, pc.ch, 100000, 77, [&](const Draw& s) {
            const double g = estimate(lin, pc.prior, pc.ch, s.y);
            const double m = estimate(pm, pc.prior, pc.ch, s.y);
            return bregman(pc.gen, s.x, g) - bregman(pc.gen, s.x, m) - bregman(pc.gen, m, g);
        });
        out.push_back(check("divergence", "pythagorean split " + pc.gen.name(), std::abs(gap.mean),
                            3.0 * gap.std_error, "paired Monte Carlo, 1e5 draws"));
    }
    return out;
}

std::vector<CheckResult> verify_priors() {
    std::vector<CheckResult> out;
    for (const Prior& p : test_priors()) {
        const std::string name = label(p);
        double worst = 0.0;
        for (double k : {-1.0, -0.5, 0.5, 1.0, 2.0, 3.0}) {
            const double m = moment(p, k);
            if (!std::isfinite(m)) continue;
            worst = std::max(worst, rel_err(m, expect(p, [k](double x) { return std::pow(x, k); })));
        }
        out.push_back(check("priors", "moments " + name, worst, 1e-7));

        worst = 0.0;
        for (double k : {0.0, 1.0, 2.0}) {
            const double v = score_weighted_moment(p, k);
            if (!std::isfinite(v)) continue;
            worst = std::max(worst, rel_err(v, expect(p, [&](double x) {
                                                  if (!interior(p, x)) return 0.0;
                                                  const double r = score(p, x);
                                                  return r * r * std::pow(x, k);
                                              })));
        }
        out.push_back(check("priors", "score-weighted moments " + name, worst, 1e-7));

        worst = 0.0;
        for (double x : {0.15, 0.4, 0.75}) {
            const double fd = orc::derivative([&](double t) { return oracle_log_pdf(p, t); }, x, 1e-4);
            worst = std::max(worst, std::abs(score(p, x) - fd) / std::max(1.0, std::abs(fd)));
        }
        out.push_back(check("priors", "score vs finite difference " + name, worst, 1e-7));
    }

    double worst = 0.0;
    for (const BetaPrior b : {BetaPrior{3.0, 5.0}, BetaPrior{3.0, 2.5}, BetaPrior{2.2, 4.0}})
        for (double a : {0.3, 0.8, 0.95})
            for (double k : {-1.0, 0.0, 1.0})
                for (double m : {1.0, 2.0}) {
                    const double v = hypergeometric_moment(b, k, m, a);
                    const double ref = orc::beta_expect(
                        b.alpha, b.beta, [&](double x) { return std::pow(x, k) / std::pow(1.0 - a * x, m); });
                    worst = std::max(worst, rel_err(v, ref));
                }
    out.push_back(check("priors", "hypergeometric moments", worst, 1e-7));

    worst = 0.0;
    for (double a : {0.5, 1.0, 2.5})
        for (double b : {1.0, 3.0, 4.5})
            for (double c : {5.5, 7.0, 9.0})
                for (double z : {0.1, 0.5, 0.85}) {
                    if (!(c > b)) continue;
                    worst = std::max(worst, rel_err(gauss_2f1_series(a, b, c, z), gauss_2f1_euler(a, b, c, z)));
                }
    out.push_back(check("priors", "2F1 series vs Euler integral", worst, 1e-8));
    return out;
}

std::vector<CheckResult> verify_channels() {
    std::vector<CheckResult> out;
    struct Pair {
        Prior prior;
        Channel ch;
    };
    const Pair cases[] = {
        {GammaPrior{2.1, 3.0}, PoissonChannel{1.0}},  {GammaPrior{0.7, 4.5}, PoissonChannel{6.0}},
        {BetaPrior{3.0, 5.0}, BinomialChannel{1, 1.0}}, {BetaPrior{3.0, 2.5}, BinomialChannel{12, 0.8}},
        {BetaPrior{1.7, 1.3}, BinomialChannel{30, 1.0}},
    };
    for (const Pair& pc : cases) {
        const std::string name = label(pc.prior) + " + " + label(pc.ch);
        const long top = std::holds_alternative<BinomialChannel>(pc.ch) ? std::get<BinomialChannel>(pc.ch).n : 50;
        double pmf_err = 0.0, pm_err = 0.0, tower = 0.0;
        const bool exact_pm = std::holds_alternative<GammaPrior>(pc.prior) ||
                              std::get<BinomialChannel>(pc.ch).a == 1.0 || std::get<BinomialChannel>(pc.ch).n == 1;
        for (long y = 0; y <= top; ++y) {
            const double ref = expect(pc.prior, [&](double x) { return oracle_likelihood(pc.ch, y, x); });
            const double got = marginal_pmf(pc.prior, pc.ch, y);
            if (ref > 1e-300) pmf_err = std::max(pmf_err, rel_err(got, ref));
            if (exact_pm && ref > 1e-200) {
                const double num = expect(pc.prior, [&](double x) { return x * oracle_likelihood(pc.ch, y, x); });
                pm_err = std::max(pm_err, rel_err(posterior_mean(pc.prior, pc.ch, y), num / ref));
            }
        }
        const MarginalLaw law = marginal_law(pc.prior, pc.ch, 1e-14);
        long double acc = 0.0L;
        for (std::size_t y = 0; y < law.pmf.size(); ++y)
            acc += static_cast<long double>(law.pmf[y]) *
                   posterior_mean(pc.prior, pc.ch, static_cast<long>(y), PosteriorMode::quadrature);
        tower = rel_err(static_cast<double>(acc), mean(pc.prior));
        out.push_back(check("channels", "marginal pmf " + name, pmf_err, 1e-7));
        if (exact_pm) out.push_back(check("channels", "posterior mean " + name, pm_err, 1e-7));
        out.push_back(check("channels", "tower property " + name, tower, 1e-8));
    }
    return out;
}

std::vector<CheckResult> verify_bounds(std::size_t samples, int grid_points) {
    std::vector<CheckResult> out;
    const Generator sq = Generator::squared();
    const Generator ne = Generator::neg_entropy();
    const Generator bl = Generator::binary_logit();
    std::uint64_t seed = 1000;

    // Margin = bound - (risk + 3 SE); passes when <= 0.
    auto dominance = [&](const std::string& name, const BoundValue& b, const RiskEstimate& r) {
        if (!b.valid) return;
        out.push_back(check("bounds", name, b.value - (r.mean + 3.0 * r.std_error), 0.0,
                            "bound " + std::to_string(b.value) + " vs risk " + std::to_string(r.mean)));
    };

    const double a_grid[] = {0.5, 1.0, 3.0, 10.0, 30.0};
    for (const GammaPrior g : {GammaPrior{2.1, 3.0}, GammaPrior{5.0, 4.0}, GammaPrior{1.5, 2.5}}) {
        for (int k = 0; k < grid_points && k < 5; ++k) {
            const PoissonChannel ch{a_grid[k]};
            const std::string tag = label(Prior{g}) + " + " + label(Channel{ch});
            const RiskEstimate mse = monte_carlo_risk(sq, g, ch, EstimatorSpec::posterior_mean(), samples, ++seed);
            dominance("classic cr " + tag, classic_cr_mmse(g, ch), mse);
            const LinearCoefficients lc = lmmse_coefficients(g, ch);
            const RiskEstimate lin =
                monte_carlo_risk(ne, g, ch, EstimatorSpec::linear(lc.c, lc.d, interior_clamp(ne)), samples, ++seed);
            const RiskEstimate best = monte_carlo_risk(
                ne, g, ch, EstimatorSpec::posterior_mean(PosteriorMode::closed_form, interior_clamp(ne)), samples,
                ++seed);
            for (auto order : {DeltaArgumentOrder::printed, DeltaArgumentOrder::swapped}) {
                const std::string o = order == DeltaArgumentOrder::printed ? "" : " swapped";
                dominance("linear cr" + o + " " + tag, cr_linear_poisson(g, ch, lc.c, lc.d, order), lin);
                dominance("universal cr" + o + " " + tag, universal_cr_poisson(g, ch, order), best);
            }
        }
    }

    const std::pair<int, double> n_grid[] = {{1, 1.0}, {5, 0.8}, {10, 1.0}, {25, 0.9}, {50, 1.0}};
    for (const BetaPrior b : {BetaPrior{3.0, 5.0}, BetaPrior{3.0, 2.5}, BetaPrior{2.5, 4.0}}) {
        for (int k = 0; k < grid_points && k < 5; ++k) {
            const BinomialChannel ch{n_grid[k].first, n_grid[k].second};
            const std::string tag = label(Prior{b}) + " + " + label(Channel{ch});
            const PosteriorMode mode = ch.a < 1.0 && ch.n > 1 ? PosteriorMode::quadrature : PosteriorMode::closed_form;
            const RiskEstimate mse = monte_carlo_risk(sq, b, ch, EstimatorSpec::posterior_mean(mode), samples, ++seed);
            dominance("classic cr " + tag, classic_cr_mmse(b, ch), mse);
            const LinearCoefficients lc = lmmse_coefficients(b, ch);
            const RiskEstimate lin =
                monte_carlo_risk(bl, b, ch, EstimatorSpec::linear(lc.c, lc.d, interior_clamp(bl)), samples, ++seed);
            const RiskEstimate best =
                monte_carlo_risk(bl, b, ch, EstimatorSpec::posterior_mean(mode, interior_clamp(bl)), samples, ++seed);
            for (auto order : {DeltaArgumentOrder::printed, DeltaArgumentOrder::swapped}) {
                const std::string o = order == DeltaArgumentOrder::printed ? "" : " swapped";
                BinomialBoundOptions opt;
                opt.order = order;
                dominance("linear cr" + o + " " + tag, cr_linear_binomial(b, ch, lc.c, lc.d, opt), lin);
                dominance("universal cr" + o + " " + tag, universal_cr_binomial(b, ch, ScoreMode::corrected, order),
                          best);
            }
        }
    }

    // The optimal psi = Delta (x - g) turns the variational ratio into the risk.
    struct Case {
        Generator gen;
        Prior prior;
        Channel ch;
    };
    const Case cases[] = {
        {sq, GammaPrior{2.1, 3.0}, PoissonChannel{1.0}},
        {ne, GammaPrior{2.1, 3.0}, PoissonChannel{2.0}},
        {bl, BetaPrior{3.0, 5.0}, BinomialChannel{4, 1.0}},
    };
    for (const Case& c : cases) {
        const EstimatorSpec est = EstimatorSpec::posterior_mean(PosteriorMode::closed_form, interior_clamp(c.gen));
        const PsiFunction psi = [&](double x, long y) {
            const double g = estimate(est, c.prior, c.ch, y);
            return delta_weight(c.gen, x, g) * (x - g);
        };
        const RiskEstimate v = variational_bound(c.gen, c.prior, c.ch, est, psi, samples, 5150);
        const RiskEstimate r = monte_carlo_risk(c.gen, c.prior, c.ch, est, samples, 5150);
        out.push_back(check("bounds", "variational optimum " + c.gen.name(), std::abs(v.mean - r.mean),
                            3.0 * r.std_error, "ratio " + std::to_string(v.mean) + " vs risk " + std::to_string(r.mean)));
    }
    return out;
}

VerifySuite parse_verify_suite(const std::string& name) {
    if (name == "divergence") return VerifySuite::divergence;
    if (name == "priors") return VerifySuite::priors;
    if (name == "channels") return VerifySuite::channels;
    if (name == "bounds") return VerifySuite::bounds;
    if (name == "all") return VerifySuite::all;
    throw ConfigError("unknown suite '" + name + "' (expected divergence, priors, channels, bounds or all)");
}

bool run_verify(VerifySuite suite, std::ostream& out) {
    std::vector<CheckResult> results;
    auto add = [&](std::vector<CheckResult> r) { results.insert(results.end(), r.begin(), r.end()); };
    const bool all = suite == VerifySuite::all;
    if (all || suite == VerifySuite::divergence) add(verify_divergence());
    if (all || suite == VerifySuite::priors) add(verify_priors());
    if (all || suite == VerifySuite::channels) add(verify_channels());
    if (all || suite == VerifySuite::bounds) add(verify_bounds());

    std::size_t failed = 0;
    for (const CheckResult& r : results) {
        char nums[96];
        std::snprintf(nums, sizeof nums, "%.3e (tol %.1e)", r.observed, r.tolerance);
        out << (r.passed ? "PASS" : "FAIL") << "  " << r.suite << "  " << r.name << "  " << nums;
        if (!r.detail.empty()) out << "  " << r.detail;
        out << '\n';
        if (!r.passed) ++failed;
    }
    out << results.size() - failed << '/' << results.size() << " checks passed\n";
    return failed == 0;
}

}  // namespace bregcr
