#include "doctest.h"

#include "bregcr/bounds.hpp"
#include "bregcr/errors.hpp"
#include "bregcr/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace bregcr;
namespace orc = bregcr::oracle;

namespace {

double gamma_rho(double alpha, double theta, double x) { return (theta - 1.0) / x - alpha; }
double beta_rho(double alpha, double beta, double x) { return (alpha - 1.0) / x - (beta - 1.0) / (1.0 - x); }

// E[F(X, Y)] for Gamma prior + Poisson(a X), inner sum over y truncated far in the tail.
double poisson_expect(double alpha, double theta, double a, const std::function<double(double, long)>& F) {
    return orc::gamma_expect(alpha, theta, [&](double x) {
        const double lam = a * x;
        const long top = static_cast<long>(lam + 40.0 * std::sqrt(lam) + 60.0);
        double s = 0.0;
        for (long y = 0; y <= top; ++y) {
            const double p = orc::poisson_pmf(lam, y);
            if (p > 0.0) s += p * F(x, y);
        }
        return s;
    });
}

double binomial_expect(double alpha, double beta, int n, double a, const std::function<double(double, long)>& F) {
    return orc::beta_expect(alpha, beta, [&](double x) {
        double s = 0.0;
        for (long y = 0; y <= n; ++y) s += orc::binomial_pmf(n, a * x, y) * F(x, y);
        return s;
    });
}

double binomial_score(double alpha, double beta, int n, double a, double x, long y) {
    return (static_cast<double>(y) - n * a * x) / (x * (1.0 - a * x)) + beta_rho(alpha, beta, x);
}

// The quadratic bound on 1/Delta written out directly.
double quad_poly(double u, double v) { return 4 * u / 3 + 2 * v / 3 - u * u - 2 * u * v / 3 - v * v / 3; }

bool dominated(const BoundValue& b, const RiskEstimate& r) { return b.value <= r.mean + 3.0 * r.std_error; }

}  // namespace

TEST_CASE("classical bound for the MMSE") {
    SUBCASE("gamma+poisson values and the degenerate range") {
        CHECK(classic_cr_mmse(GammaPrior{2.1, 3}, PoissonChannel{0}).value ==
              doctest::Approx(0.226757369614512).epsilon(1e-13));
        CHECK(classic_cr_mmse(GammaPrior{2.1, 3}, PoissonChannel{15}).value ==
              doctest::Approx(0.0496031746031746).epsilon(1e-13));
        for (double a : {0.5, 3.0, 40.0}) {
            const double alpha = 2.1, theta = 3.0;
            const double want = (theta - 1) / (alpha * (a + alpha * (theta - 1) / (theta - 2)));
            CHECK(classic_cr_mmse(GammaPrior{alpha, theta}, PoissonChannel{a}).value ==
                  doctest::Approx(want).epsilon(1e-13));
        }
        const BoundValue deg = classic_cr_mmse(GammaPrior{2.0, 1.5}, PoissonChannel{1});
        CHECK(deg.valid);
        CHECK(deg.value == 0.0);
        CHECK(std::count(deg.assumptions.begin(), deg.assumptions.end(), "moment-infinite") == 1);
        const BoundValue bad = classic_cr_mmse(GammaPrior{2.0, 0.9}, PoissonChannel{1});
        CHECK_FALSE(bad.valid);
        CHECK(bad.value == 0.0);
        CHECK(std::count(bad.assumptions.begin(), bad.assumptions.end(), "regularity") == 1);
    }
    SUBCASE("beta+binomial Fisher term variants") {
        const BetaPrior b{3, 2.5};
        const BinomialChannel ch{1, 0.8};
        CHECK(classic_cr_mmse(b, ch, ScoreMode::paper_verbatim).value ==
              doctest::Approx(0.00882705073044494).epsilon(1e-12));
        // rho^2 f behaves like (1 - x)^(-1/2) here, which costs the oracle about 1e-8.
        for (int n : {1, 4, 17}) {
            const BinomialChannel c{n, 0.8};
            const double fisher = orc::beta_expect(3, 2.5, [&](double x) {
                const double r = beta_rho(3, 2.5, x);
                return n * 0.8 / (x * (1 - 0.8 * x)) + r * r;
            });
            CHECK(classic_cr_mmse(b, c).value == doctest::Approx(1.0 / fisher).epsilon(1e-7));
            const double printed = orc::beta_expect(3, 2.5, [&](double x) {
                const double r = beta_rho(3, 2.5, x);
                return n * 0.8 / x + r * r;
            });
            const BoundValue inv = classic_cr_mmse(b, c, ScoreMode::corrected, BinomialFisherTerm::inverse_mean);
            CHECK(inv.value == doctest::Approx(1.0 / printed).epsilon(1e-7));
            CHECK(inv.formula != classic_cr_mmse(b, c).formula);
        }
        CHECK_FALSE(classic_cr_mmse(BetaPrior{1.0, 3}, ch).valid);
    }
    SUBCASE("beta prior with a poisson channel carries a support note") {
        const BoundValue b = classic_cr_mmse(BetaPrior{3, 5}, PoissonChannel{2});
        CHECK(b.valid);
        CHECK(std::count(b.assumptions.begin(), b.assumptions.end(), "support-mismatch") == 1);
        const double fisher = orc::beta_expect(3, 5, [](double x) {
            const double r = beta_rho(3, 5, x);
            return 2.0 / x + r * r;
        });
        CHECK(b.value == doctest::Approx(1.0 / fisher).epsilon(1e-10));
    }
    SUBCASE("order of the bound in a") {
        // a * bound tends to 1/E[1/X] = (theta - 1)/alpha.
        std::vector<double> scaled;
        for (double a : {1e2, 1e3, 1e4}) scaled.push_back(a * classic_cr_mmse(GammaPrior{2.1, 3}, PoissonChannel{a}).value);
        CHECK(scaled.back() == doctest::Approx(2.0 / 2.1).epsilon(1e-3));
        CHECK(*std::max_element(scaled.begin(), scaled.end()) / *std::min_element(scaled.begin(), scaled.end()) <
              1.05);
    }
}

TEST_CASE("closed-form bound for linear estimators under poisson") {
    const GammaPrior g{2.1, 3};
    const PoissonChannel ch{1};
    CHECK(cr_linear_poisson(g, ch, 1 / 3.1, 3 / 3.1).value == doctest::Approx(1.0 / 8.548387096774194).epsilon(1e-12));

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> cu(0.0, 2.0);
    for (int t = 0; t < 6; ++t) {
        const double alpha = 1.0 + 3.0 * cu(rng), theta = 2.2 + 2.0 * cu(rng), a = 0.2 + 2.0 * cu(rng);
        const double c1 = cu(rng), c2 = cu(rng);
        for (auto order : {DeltaArgumentOrder::printed, DeltaArgumentOrder::swapped}) {
            const double wx = order == DeltaArgumentOrder::printed ? 4.0 / 3 : 2.0 / 3;
            const double wg = 2.0 - wx;
            const double d = poisson_expect(alpha, theta, a, [&](double x, long y) {
                const double s = static_cast<double>(y) / x - a + gamma_rho(alpha, theta, x);
                return s * s * (wx * x + wg * (c1 * y + c2));
            });
            const BoundValue b = cr_linear_poisson(GammaPrior{alpha, theta}, PoissonChannel{a}, c1, c2, order);
            CHECK(b.valid);
            CHECK(b.value == doctest::Approx(1.0 / d).epsilon(1e-8));
        }
    }

    const BoundValue deg = cr_linear_poisson(GammaPrior{2.0, 1.5}, PoissonChannel{3}, 0.2, 0.5);
    CHECK(deg.valid);
    CHECK(deg.value == 0.0);
    CHECK_THROWS_AS(cr_linear_poisson(g, ch, -0.1, 0.5), DomainError);
    CHECK_FALSE(cr_linear_poisson(GammaPrior{2.0, 0.5}, ch, 0.2, 0.5).valid);
}

TEST_CASE("linear poisson bounds lie below the risk of the estimator") {
    const Generator gen = Generator::neg_entropy();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> cu(0.0, 1.5);
    for (int t = 0; t < 20; ++t) {
        const double c1 = cu(rng), c2 = 0.05 + cu(rng);
        const GammaPrior g{2.1, 3};
        const PoissonChannel ch{1};
        const RiskEstimate r =
            monte_carlo_risk(gen, g, ch, EstimatorSpec::linear(c1, c2, interior_clamp(gen)), 20000, 100 + t);
        CHECK(dominated(cr_linear_poisson(g, ch, c1, c2), r));
        CHECK(dominated(cr_linear_poisson(g, ch, c1, c2, DeltaArgumentOrder::swapped), r));
    }
}

TEST_CASE("universal poisson bound") {
    const GammaPrior g{2.1, 3};
    const PoissonChannel ch{1};
    const double c = 3 / 3.1;
    const BoundValue u = universal_cr_poisson(g, ch);
    CHECK(u.value == doctest::Approx(cr_linear_poisson(g, ch, c, c).value).epsilon(1e-14));
    CHECK(u.formula == "universal-cr-poisson");
    const double risk = exact_bregman_risk(Generator::neg_entropy(), g, ch);
    CHECK(u.value <= risk);
    CHECK(universal_cr_poisson(g, ch, DeltaArgumentOrder::swapped).value <= risk);

    SUBCASE("chain of relaxations for theta > 2") {
        for (double a : {0.5, 1.0, 4.0, 20.0}) {
            const PoissonChannel pc{a};
            const LinearCoefficients lc = lmmse_coefficients(g, pc);
            const double lin = cr_linear_poisson(g, pc, lc.c, lc.d).value;
            CHECK(universal_cr_poisson(g, pc).value <= lin);
            CHECK(lin <= exact_bregman_risk(Generator::neg_entropy(), g, pc));
        }
    }
    SUBCASE("order in a") {
        std::vector<double> scaled;
        for (double a = 1.0; a <= 100.0; a *= 1.5) scaled.push_back(a * universal_cr_poisson(g, PoissonChannel{a}).value);
        const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
        CHECK(*lo > 0.05);
        CHECK(*hi < 1.0);
    }
    SUBCASE("degenerate and irregular priors") {
        const BoundValue deg = universal_cr_poisson(GammaPrior{2.0, 1.5}, ch);
        CHECK(deg.valid);
        CHECK(deg.value == 0.0);
        CHECK_FALSE(universal_cr_poisson(GammaPrior{2.0, 0.7}, ch).valid);
    }
}

TEST_CASE("G function") {
    CHECK(g_function(BetaPrior{3, 5}, BinomialChannel{1, 1}, 0, 0) == doctest::Approx(61.25).epsilon(1e-12));

    SUBCASE("m = 0 reduces to the conditional variance") {
        for (int r = 0; r <= 2; ++r)
            for (auto [n, a] : {std::pair{1, 1.0}, std::pair{7, 0.6}, std::pair{30, 0.95}}) {
                const double want = orc::beta_expect(3.5, 4, [&](double x) {
                    const double rho = beta_rho(3.5, 4, x);
                    return n * a * std::pow(x, r - 1) / (1 - a * x) + rho * rho * std::pow(x, r);
                });
                CHECK(g_function(BetaPrior{3.5, 4}, BinomialChannel{n, a}, r, 0) ==
                      doctest::Approx(want).epsilon(1e-9));
            }
    }
    SUBCASE("defining expectation by quadrature") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int t = 0; t < 8; ++t) {
            const double alpha = 2.2 + 3 * u(rng), beta = 2.2 + 3 * u(rng), a = 0.3 + 0.7 * u(rng);
            const int n = 1 + static_cast<int>(20 * u(rng));
            const int r = t % 3, m = (t / 3) % 3;
            const double want = binomial_expect(alpha, beta, n, a, [&](double x, long y) {
                const double s = binomial_score(alpha, beta, n, a, x, y);
                return s * s * std::pow(x, r) * std::pow(static_cast<double>(y), m);
            });
            CHECK(g_function(BetaPrior{alpha, beta}, BinomialChannel{n, a}, r, m) ==
                  doctest::Approx(want).epsilon(1e-8));
        }
    }
    SUBCASE("defining expectation by Monte Carlo") {
        const BetaPrior b{3, 5};
        const BinomialChannel ch{6, 0.9};
        for (auto [r, m] : {std::pair{0, 2}, std::pair{1, 1}, std::pair{2, 0}, std::pair{0, 1}, std::pair{1, 0}}) {
            const RiskEstimate mc = monte_carlo_expectation(b, ch, 200000, 9, [&](const Draw& d) {
                const double s = joint_score(b, ch, d.x, d.y);
                return s * s * std::pow(d.x, r) * std::pow(static_cast<double>(d.y), m);
            });
            CHECK(std::abs(g_function(b, ch, r, m) - mc.mean) <= 5.0 * mc.std_error);
        }
    }
    SUBCASE("divergent moments") {
        // E[rho^2] needs alpha > 2.
        CHECK(std::isinf(g_function(BetaPrior{1.5, 5}, BinomialChannel{2, 1}, 0, 0)));
        CHECK(std::isfinite(g_function(BetaPrior{1.5, 5}, BinomialChannel{2, 1}, 2, 0)));
        CHECK_THROWS_AS(g_function(BetaPrior{3, 5}, BinomialChannel{2, 1}, 3, 0), DomainError);
    }
}

TEST_CASE("kappa table expands the quadratic bound") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    for (int t = 0; t < 200; ++t) {
        const double c1 = u(rng), c2 = u(rng), x = u(rng), y = 5 * u(rng);
        const double g = c1 * y + c2;
        for (auto order : {DeltaArgumentOrder::printed, DeltaArgumentOrder::swapped}) {
            const KappaTable k = kappa_table(c1, c2, KappaSigns::polynomial, order);
            double sum = 0.0;
            for (int r = 0; r <= 2; ++r)
                for (int m = 0; m <= 2; ++m) sum += k[r][m] * std::pow(x, r) * std::pow(y, m);
            const double want = order == DeltaArgumentOrder::printed ? quad_poly(x, g) : quad_poly(g, x);
            CHECK(sum == doctest::Approx(want).epsilon(1e-12).scale(1.0));
        }
        const KappaTable p = kappa_table(c1, c2, KappaSigns::as_printed);
        CHECK(p[0][2] == doctest::Approx(c1 * c1 / 3));
        CHECK(p[1][1] == doctest::Approx(std::abs(2 * c1 / 3)));
        CHECK(p[2][0] == -1.0);
    }
    // The library's bound on 1/Delta uses the same polynomial.
    CHECK(delta_inverse_upper(GeneratorKind::binary_logit, 0.3, 0.6, DeltaBoundLevel::quadratic) ==
          doctest::Approx(quad_poly(0.3, 0.6)));
}

TEST_CASE("closed-form bound for linear estimators under binomial") {
    const BetaPrior b{3, 5};
    SUBCASE("matches 1/E[s^2 q] by quadrature") {
        for (int n : {1, 11, 31}) {
            const BinomialChannel ch{n, 1};
            const LinearCoefficients lc = lmmse_coefficients(b, ch);
            for (auto order : {DeltaArgumentOrder::printed, DeltaArgumentOrder::swapped}) {
                const double d = binomial_expect(3, 5, n, 1, [&](double x, long y) {
                    const double s = binomial_score(3, 5, n, 1, x, y);
                    const double g = lc.c * y + lc.d;
                    return s * s * (order == DeltaArgumentOrder::printed ? quad_poly(x, g) : quad_poly(g, x));
                });
                BinomialBoundOptions opt;
                opt.order = order;
                CHECK(cr_linear_binomial(b, ch, lc.c, lc.d, opt).value == doctest::Approx(1.0 / d).epsilon(1e-8));
            }
        }
    }
    SUBCASE("frozen values at the linear MMSE coefficients") {
        const double poly[] = {0.0491008284501916, 0.0252925103341974, 0.0126413249150181};
        const double printed[] = {0.0464094728800609, 0.01836963158966, 0.00810053684031129};
        int i = 0;
        for (int n : {1, 11, 31}) {
            const BinomialChannel ch{n, 1};
            const LinearCoefficients lc = lmmse_coefficients(b, ch);
            BinomialBoundOptions opt;
            CHECK(cr_linear_binomial(b, ch, lc.c, lc.d, opt).value == doctest::Approx(poly[i]).epsilon(1e-10));
            opt.signs = KappaSigns::as_printed;
            CHECK(cr_linear_binomial(b, ch, lc.c, lc.d, opt).value == doctest::Approx(printed[i]).epsilon(1e-10));
            ++i;
        }
    }
    SUBCASE("dominance against the binary-logit risk") {
        const Generator gen = Generator::binary_logit();
        for (int n : {1, 11, 31}) {
            const BinomialChannel ch{n, 1};
            const LinearCoefficients lc = lmmse_coefficients(b, ch);
            const RiskEstimate r =
                monte_carlo_risk(gen, b, ch, EstimatorSpec::linear(lc.c, lc.d, interior_clamp(gen)), 50000, 31 + n);
            for (auto signs : {KappaSigns::polynomial, KappaSigns::as_printed})
                for (auto order : {DeltaArgumentOrder::printed, DeltaArgumentOrder::swapped}) {
                    const BoundValue v = cr_linear_binomial(b, ch, lc.c, lc.d, {ScoreMode::corrected, signs, order});
                    CHECK(v.valid);
                    CHECK(dominated(v, r));
                }
        }
    }
    SUBCASE("order in n") {
        std::vector<double> scaled;
        for (int n : {10, 25, 50, 100, 200}) {
            const BinomialChannel ch{n, 1};
            const LinearCoefficients lc = lmmse_coefficients(b, ch);
            scaled.push_back(n * cr_linear_binomial(b, ch, lc.c, lc.d).value);
        }
        const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
        CHECK(*lo > 0.1);
        CHECK(*hi / *lo < 2.0);
    }
    SUBCASE("estimates far outside the unit interval invalidate the bound") {
        const BoundValue v = cr_linear_binomial(b, BinomialChannel{3, 1}, 0.0, 3.0);
        CHECK_FALSE(v.valid);
        CHECK(v.value == 0.0);
        CHECK(std::count(v.assumptions.begin(), v.assumptions.end(), "negative-denominator") == 1);
    }
    SUBCASE("divergent moments give a degenerate bound") {
        const BoundValue v = cr_linear_binomial(BetaPrior{1.5, 5}, BinomialChannel{3, 1}, 0.1, 0.2);
        CHECK(v.valid);
        CHECK(v.value == 0.0);
    }
}

TEST_CASE("universal binomial bound") {
    const BetaPrior b{3, 5};
    const BinomialChannel ch{1, 1};
    const BoundValue c = universal_cr_binomial(b, ch);
    CHECK(c.value == doctest::Approx(1.0 / (637.0 / 12.0)).epsilon(1e-12));
    const BoundValue v = universal_cr_binomial(b, ch, ScoreMode::paper_verbatim);
    CHECK(v.value == doctest::Approx(1.0 / 215.75).epsilon(1e-12));
    const double risk = exact_bregman_risk(Generator::binary_logit(), b, ch);
    CHECK(risk == doctest::Approx(0.0878463).epsilon(1e-6));
    CHECK(c.value <= risk);
    CHECK(v.value <= risk);

    SUBCASE("quadrature of the defining expectations") {
        for (auto [n, a] : {std::pair{1, 1.0}, std::pair{9, 0.7}, std::pair{40, 1.0}}) {
            for (auto order : {DeltaArgumentOrder::printed, DeltaArgumentOrder::swapped}) {
                const double d = orc::beta_expect(3, 5, [&](double x) {
                    const double rho = beta_rho(3, 5, x);
                    const double poly = order == DeltaArgumentOrder::printed
                                            ? 2.0 / 3 + 4 * x / 3 - x * x
                                            : 4.0 / 9 + 2 * x / 9 - 2 * x * x / 9;
                    return poly * (n * a / (x * (1 - a * x)) + rho * rho);
                });
                CHECK(universal_cr_binomial(b, BinomialChannel{n, a}, ScoreMode::corrected, order).value ==
                      doctest::Approx(1.0 / d).epsilon(1e-9));
            }
        }
    }
    SUBCASE("the swapped polynomial dominates the quadratic bound for every estimate") {
        for (double x = 0.0; x <= 1.0; x += 0.05)
            for (double g = 0.0; g <= 1.0; g += 0.05) CHECK(4.0 / 9 + 2 * x / 9 - 2 * x * x / 9 >= quad_poly(g, x) - 1e-15);
    }
    CHECK_FALSE(universal_cr_binomial(BetaPrior{3, 0.8}, ch).valid);
}

TEST_CASE("variational evaluator") {
    SUBCASE("the optimal psi attains the risk") {
        struct Case {
            Generator gen;
            Prior prior;
            Channel ch;
        };
        const std::vector<Case> cases = {
            {Generator::squared(), GammaPrior{2.1, 3}, PoissonChannel{1}},
            {Generator::neg_entropy(), GammaPrior{2.1, 3}, PoissonChannel{2}},
            {Generator::binary_logit(), BetaPrior{3, 5}, BinomialChannel{4, 1}},
        };
        for (const auto& c : cases) {
            const EstimatorSpec est = EstimatorSpec::posterior_mean(PosteriorMode::closed_form, interior_clamp(c.gen));
            const PsiFunction psi = [&](double x, long y) {
                const double g = estimate(est, c.prior, c.ch, y);
                return delta_weight(c.gen, x, g) * (x - g);
            };
            const RiskEstimate v = variational_bound(c.gen, c.prior, c.ch, est, psi, 20000, 4);
            const RiskEstimate r = monte_carlo_risk(c.gen, c.prior, c.ch, est, 20000, 4);
            CHECK(v.mean == doctest::Approx(r.mean).epsilon(1e-7));
        }
    }
    SUBCASE("the score reproduces the generalized bound") {
        const Generator gen = Generator::neg_entropy();
        const GammaPrior g{2.1, 3};
        const PoissonChannel ch{1};
        const EstimatorSpec est = EstimatorSpec::linear(1 / 3.1, 3 / 3.1);
        const PsiFunction psi = [&](double x, long y) { return joint_score(g, ch, x, y); };
        const RiskEstimate v = variational_bound(gen, g, ch, est, psi, 40000, 8);
        const BoundValue gcr = generalized_cr_monte_carlo(gen, g, ch, est, 40000, 8);
        // E[(X - g) s] = 1 in the limit, so the ratio tends to 1 / E[s^2 / Delta].
        CHECK(std::abs(v.mean - gcr.value) <= 3.0 * (v.std_error + gcr.std_error));
        CHECK(v.std_error > 0.0);
    }
    SUBCASE("a constant psi gives nothing for an unbiased estimator") {
        const Generator gen = Generator::squared();
        const GammaPrior g{2.1, 3};
        const PoissonChannel ch{1};
        const EstimatorSpec est = EstimatorSpec::posterior_mean();
        const RiskEstimate num =
            monte_carlo_expectation(g, ch, 20000, 6, [&](const Draw& d) { return d.x - estimate(est, g, ch, d.y); });
        const RiskEstimate v = variational_bound(gen, g, ch, est, [](double, long) { return 1.0; }, 20000, 6);
        // Delta = 1 for the squared generator, so the ratio is the squared mean error.
        CHECK(v.mean == doctest::Approx(num.mean * num.mean).epsilon(1e-9));
        CHECK(v.mean <= 9.0 * num.std_error * num.std_error);
    }
    SUBCASE("errors") {
        const GammaPrior g{2.1, 3};
        const PoissonChannel ch{1};
        const EstimatorSpec est = EstimatorSpec::posterior_mean();
        CHECK_THROWS_AS(variational_bound(Generator::squared(), g, ch, est, [](double, long) { return 0.0; }, 1000, 1),
                        DomainError);
        CHECK_THROWS_AS(variational_bound(Generator::squared(), g, ch, est, [](double, long) { return 1.0; }, 10, 1),
                        DomainError);
    }
}

TEST_CASE("generalized bound by Monte Carlo") {
    SUBCASE("squared generator gives the classical bound") {
        const GammaPrior g{2.1, 3};
        for (double a : {0.5, 3.0}) {
            const PoissonChannel ch{a};
            const BoundValue mc = generalized_cr_monte_carlo(Generator::squared(), g, ch, EstimatorSpec::posterior_mean(),
                                                             100000, 12);
            CHECK(std::abs(mc.value - classic_cr_mmse(g, ch).value) <= 3.0 * mc.std_error);
        }
        const BetaPrior b{3, 2.5};
        const BinomialChannel bc{5, 0.8};
        const BoundValue mc =
            generalized_cr_monte_carlo(Generator::squared(), b, bc, EstimatorSpec::posterior_mean(), 100000, 13);
        CHECK(std::abs(mc.value - classic_cr_mmse(b, bc).value) <= 3.0 * mc.std_error);
    }
    SUBCASE("linear estimator under neg-entropy") {
        const Generator gen = Generator::neg_entropy();
        const GammaPrior g{2.1, 3};
        const PoissonChannel ch{1};
        const EstimatorSpec est = EstimatorSpec::linear(1 / 3.1, 3 / 3.1);
        const BoundValue mc = generalized_cr_monte_carlo(gen, g, ch, est, 50000, 14);
        CHECK(mc.valid);
        const double swapped = cr_linear_poisson(g, ch, 1 / 3.1, 3 / 3.1, DeltaArgumentOrder::swapped).value;
        const double printed = cr_linear_poisson(g, ch, 1 / 3.1, 3 / 3.1).value;
        CHECK(swapped <= mc.value - 3.0 * mc.std_error);
        // The printed weighting is not a relaxation of this bound.
        CHECK(printed >= mc.value + 3.0 * mc.std_error);
        CHECK(dominated(mc, monte_carlo_risk(gen, g, ch, est, 50000, 15)));
    }
    SUBCASE("linear estimator under binary-logit") {
        const Generator gen = Generator::binary_logit();
        const BetaPrior b{3, 5};
        for (int n : {1, 11}) {
            const BinomialChannel ch{n, 1};
            const LinearCoefficients lc = lmmse_coefficients(b, ch);
            const EstimatorSpec est = EstimatorSpec::linear(lc.c, lc.d);
            const BoundValue mc = generalized_cr_monte_carlo(gen, b, ch, est, 50000, 16);
            BinomialBoundOptions opt;
            opt.order = DeltaArgumentOrder::swapped;
            CHECK(cr_linear_binomial(b, ch, lc.c, lc.d, opt).value <= mc.value + 3.0 * mc.std_error);
            CHECK(universal_cr_binomial(b, ch, ScoreMode::corrected, DeltaArgumentOrder::swapped).value <=
                  mc.value + 3.0 * mc.std_error);
            CHECK(dominated(mc, monte_carlo_risk(gen, b, ch, est, 50000, 17)));
        }
    }
    SUBCASE("irregular prior") {
        const BoundValue v = generalized_cr_monte_carlo(Generator::squared(), GammaPrior{1, 0.8}, PoissonChannel{1},
                                                        EstimatorSpec::posterior_mean(), 1000, 1);
        CHECK_FALSE(v.valid);
        CHECK(v.value == 0.0);
    }
}

TEST_CASE("dominance across priors and channels") {
    const Generator sq = Generator::squared();
    const Generator ne = Generator::neg_entropy();
    const Generator bl = Generator::binary_logit();
    const std::vector<Prior> gamma_side = {GammaPrior{2.1, 3}, GammaPrior{5, 4}, BetaPrior{3, 5}};
    for (const Prior& p : gamma_side)
        for (double a : {0.5, 5.0}) {
            const PoissonChannel ch{a};
            const PosteriorMode mode =
                std::holds_alternative<GammaPrior>(p) ? PosteriorMode::closed_form : PosteriorMode::quadrature;
            const RiskEstimate mse = monte_carlo_risk(sq, p, ch, EstimatorSpec::posterior_mean(mode), 20000, 40);
            CHECK(dominated(classic_cr_mmse(p, ch), mse));
            const LinearCoefficients lc = lmmse_coefficients(p, ch);
            const RiskEstimate r =
                monte_carlo_risk(ne, p, ch, EstimatorSpec::linear(lc.c, lc.d, interior_clamp(ne)), 20000, 41);
            for (auto order : {DeltaArgumentOrder::printed, DeltaArgumentOrder::swapped}) {
                const BoundValue v = cr_linear_poisson(p, ch, lc.c, lc.d, order);
                CHECK(v.valid);
                CHECK(dominated(v, r));
                if (const auto* g = std::get_if<GammaPrior>(&p)) {
                    const RiskEstimate best = monte_carlo_risk(ne, p, ch, EstimatorSpec::posterior_mean(), 20000, 42);
                    CHECK(dominated(universal_cr_poisson(*g, ch, order), best));
                }
            }
        }
    const std::vector<BetaPrior> beta_side = {BetaPrior{3, 5}, BetaPrior{3, 2.5}, BetaPrior{2.5, 4}};
    for (const BetaPrior& b : beta_side)
        for (auto [n, a] : {std::pair{1, 1.0}, std::pair{10, 0.8}, std::pair{40, 1.0}}) {
            const BinomialChannel ch{n, a};
            const RiskEstimate mse =
                monte_carlo_risk(sq, b, ch, EstimatorSpec::posterior_mean(PosteriorMode::quadrature), 20000, 43);
            CHECK(dominated(classic_cr_mmse(b, ch), mse));
            const LinearCoefficients lc = lmmse_coefficients(b, ch);
            const RiskEstimate r =
                monte_carlo_risk(bl, b, ch, EstimatorSpec::linear(lc.c, lc.d, interior_clamp(bl)), 20000, 44);
            const RiskEstimate best = monte_carlo_risk(
                bl, b, ch, EstimatorSpec::posterior_mean(PosteriorMode::quadrature, interior_clamp(bl)), 20000, 45);
            for (auto order : {DeltaArgumentOrder::printed, DeltaArgumentOrder::swapped}) {
                BinomialBoundOptions opt;
                opt.order = order;
                const BoundValue v = cr_linear_binomial(b, ch, lc.c, lc.d, opt);
                if (v.valid) CHECK(dominated(v, r));
                const BoundValue u = universal_cr_binomial(b, ch, ScoreMode::corrected, order);
                CHECK(u.valid);
                CHECK(dominated(u, best));
            }
        }
}
