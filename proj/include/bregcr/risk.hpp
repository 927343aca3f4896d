#pragma once

#include "bregcr/channels.hpp"
#include "bregcr/divergence.hpp"
#include "bregcr/priors.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

namespace bregcr {

struct LinearEstimator {
    double c = 0.0;
    double d = 0.0;
};

struct PosteriorMeanEstimator {
    PosteriorMode mode = PosteriorMode::closed_form;
};

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
};

struct EstimatorSpec {
    std::variant<LinearEstimator, PosteriorMeanEstimator> kind;
    // Estimates are clipped into this interval before the loss is evaluated.
    std::optional<Interval> clamp;

    static EstimatorSpec linear(double c, double d, std::optional<Interval> clamp = std::nullopt);
    static EstimatorSpec posterior_mean(PosteriorMode mode = PosteriorMode::closed_form,
                                        std::optional<Interval> clamp = std::nullopt);
};

// Interior margin used when a divergence needs strictly interior estimates.
inline constexpr double interior_margin = 1e-12;

// The clamp that keeps estimates inside the generator's scalar domain by
// interior_margin, or nullopt when the domain is the whole line.
std::optional<Interval> interior_clamp(const Generator& gen);

// The estimate g(y) for one output, clamp applied.
double estimate(const EstimatorSpec& est, const Prior& prior, const Channel& ch, long y);

struct RiskEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
};

struct Draw {
    double x = 0.0;
    long y = 0;
};

// Draw i is (X, Y) from Substream(seed, i): X from the prior, then Y from the
// channel on the same substream.
Draw draw_at(const Prior& prior, const Channel& ch, std::uint64_t seed, std::size_t index);
std::vector<Draw> draw_joint(const Prior& prior, const Channel& ch, std::size_t n, std::uint64_t seed);

// g(y) indexed by y for every output present in draws (0 for absent outputs).
std::vector<double> estimate_table(const EstimatorSpec& est, const Prior& prior, const Channel& ch,
                                   const std::vector<Draw>& draws);

// Mean and standard error of per-sample values.  Values are summed pairwise in
// blocks of 4096 and the block sums are combined in index order, so the result
// does not depend on the number of threads.
RiskEstimate summarize(const std::vector<double>& values, std::uint64_t seed);
RiskEstimate summarize_serial(const std::vector<double>& values, std::uint64_t seed);

// Monte-Carlo estimate of E[f(X, Y)] over n joint draws (OpenMP-parallel).
RiskEstimate monte_carlo_expectation(const Prior& prior, const Channel& ch, std::size_t n, std::uint64_t seed,
                                     const std::function<double(const Draw&)>& f);

// Monte-Carlo estimate of E[l(X, g(Y))].  Estimates are tabulated once per
// distinct output before the loss loop.  Throws DomainError naming the first
// offending sample when the loss is undefined there.
RiskEstimate monte_carlo_risk(const Generator& gen, const Prior& prior, const Channel& ch, const EstimatorSpec& est,
                              std::size_t n, std::uint64_t seed);
// Single-threaded reference with the same arithmetic; bitwise equal to the above.
RiskEstimate monte_carlo_risk_serial(const Generator& gen, const Prior& prior, const Channel& ch,
                                     const EstimatorSpec& est, std::size_t n, std::uint64_t seed);

// Linear MMSE: V/(a V/E[X] + 1) for Poisson and V/(1 + n a V/(E[X] - a E[X^2]))
// for binomial.  The moment mode only affects E[X^2].
double lmmse_value(const Prior& prior, const Channel& ch, MomentMode mode = MomentMode::corrected);

struct MmseValue {
    double value = 0.0;
    // False when the linear value is not known to equal the MMSE: beta+binomial
    // with a < 1 and n >= 2, or the paper-verbatim moment mode.
    bool exactness_verified = true;
};

// Gamma+Poisson and Beta+Binomial, where the posterior mean is linear.
MmseValue exact_mmse(const Prior& prior, const Channel& ch, MomentMode mode = MomentMode::corrected);

// Bayesian Bregman risk of the posterior mean for the natural pairs
// neg-entropy/Poisson with a gamma prior and binary-logit/binomial with a beta
// prior.  Summed per output as E[l(X, m(y)) | Y = y] so that no cancellation
// between E[phi(X)] and E[phi(m(Y))] occurs; the Poisson tail is certified to tol.
double exact_bregman_risk(const Generator& gen, const Prior& prior, const Channel& ch, double tol = 1e-12);

struct BTermBounds {
    double lower = 0.0;
    double upper = 0.0;
};

// Bounds on the B term of the exact risk.
//   Poisson:  E[h log h] <= B <= E[X log h],  h = (a X + theta)/(alpha + a),
//             with R = E[X log X] - B.
//   Binomial: B = E[m log((1 - m)/m)], m = c* Y + d*, with R = E[X logit X] + B
//             when the linear estimator is the posterior mean.  The upper bound
//             replaces Y by n a X; the lower bound is the chord of the concave
//             integrand over [d*, c* n + d*] at E[X].
BTermBounds b_term_bounds(const Prior& prior, const Channel& ch);

struct SandwichBounds {
    double low = 0.0;
    double high = 0.0;
    SandwichConstants kappa;
    double mass_outside = 0.0;
};

// (kappa_l/2) mmse <= R <= (kappa_u/2) mmse with Hessian bounds on the box.
// Without a box the prior support is used and an endpoint where the Hessian
// blows up raises UnboundedHessianError; with a box, prior mass of 1e-6 or
// more outside it raises the same error.
SandwichBounds sandwich_bounds(const Generator& gen, const Prior& prior, const Channel& ch,
                               std::optional<Box> box = std::nullopt, int grid = 2001);

}  // namespace bregcr
