#pragma once

#include "bregcr/channels.hpp"
#include "bregcr/divergence.hpp"
#include "bregcr/priors.hpp"
#include "bregcr/risk.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace bregcr {

struct BoundValue {
    // 0 encodes a degenerate bound (an infinite Fisher-type denominator).
    double value = 0.0;
    bool valid = false;
    // Codes such as "regularity", "moment-infinite", "negative-denominator",
    // plus any reasons reported by regularity_check.
    std::vector<std::string> assumptions;
    std::string formula;
    // Monte-Carlo standard error of value; 0 for closed forms.
    double std_error = 0.0;
};

// Which argument of the Delta weight the polynomial upper bound on its inverse
// is applied to.  With l(x, g) = (x - g)^2 Delta(x, g) and
// Delta(x, g) = int (1 - t) H(g + t (x - g)) dt, the proven bound is
// 1/Delta(x, g) <= p(g, x) (`swapped`).  `printed` evaluates p(x, g), the
// weighting used for the published figures.
enum class DeltaArgumentOrder { printed, swapped };

// The Y^2 and XY coefficients of the binomial kappa table.  `polynomial`
// expands the quadratic bound on 1/Delta; `as_printed` flips both to positive.
enum class KappaSigns { polynomial, as_printed };

// Fisher term of the binomial classical bound: n a E[1/(X (1 - a X))] from the
// conditional variance, or the printed n a E[1/X].
enum class BinomialFisherTerm { conditional_variance, inverse_mean };

// d/dx log f(x, y) for the joint law of prior and channel.
double joint_score(const Prior& prior, const Channel& ch, double x, long y, ScoreMode mode = ScoreMode::corrected);

// 1 / (a E[1/X] + E[rho^2]) for Poisson and 1 / (n a E[1/(X (1 - a X))] + E[rho^2])
// for binomial.
BoundValue classic_cr_mmse(const Prior& prior, const Channel& ch, ScoreMode score = ScoreMode::corrected,
                           BinomialFisherTerm term = BinomialFisherTerm::conditional_variance);

// 1 / D for the linear estimator c1 y + c2 under the neg-entropy divergence,
//   D = w_x (a + E[rho^2 X]) + w_g c1 (a^2 + a E[1/X] + a E[rho^2 X]) + w_g c2 (a E[1/X] + E[rho^2])
// with (w_x, w_g) = (4/3, 2/3) printed or (2/3, 4/3) swapped.
BoundValue cr_linear_poisson(const Prior& prior, const PoissonChannel& ch, double c1, double c2,
                             DeltaArgumentOrder order = DeltaArgumentOrder::printed);

// cr_linear_poisson at c1 = c2 = c, where c bounds the posterior mean by c (y + 1).
BoundValue universal_cr_poisson(const GammaPrior& prior, const PoissonChannel& ch,
                                DeltaArgumentOrder order = DeltaArgumentOrder::printed);

// G(a; r, m) = E[s^2 X^r Y^m] with s the joint score, assembled from
// hypergeometric and score-weighted moments.  +infinity when a needed moment
// diverges.
double g_function(const BetaPrior& prior, const BinomialChannel& ch, int r, int m,
                  ScoreMode score = ScoreMode::corrected);

// kappa[r][m] with sum kappa[r][m] X^r Y^m = q evaluated at (X, c1 Y + c2)
// (printed) or (c1 Y + c2, X) (swapped), q the quadratic bound on 1/Delta.
using KappaTable = std::array<std::array<double, 3>, 3>;
KappaTable kappa_table(double c1, double c2, KappaSigns signs = KappaSigns::polynomial,
                       DeltaArgumentOrder order = DeltaArgumentOrder::printed);

struct BinomialBoundOptions {
    ScoreMode score = ScoreMode::corrected;
    KappaSigns signs = KappaSigns::polynomial;
    DeltaArgumentOrder order = DeltaArgumentOrder::printed;
};

// 1 / sum kappa[r][m] G(a; r, m) for the linear estimator c1 y + c2 under the
// binary-logit divergence.  A negative denominator makes the bound invalid.
BoundValue cr_linear_binomial(const BetaPrior& prior, const BinomialChannel& ch, double c1, double c2,
                              const BinomialBoundOptions& opt = {});

// 1 / sum_k c_k (n a E[X^(k-1)/(1 - a X)] + E[rho^2 X^k]) with c = (2/3, 4/3, -1)
// printed, or c = (4/9, 2/9, -2/9) swapped (the quadratic bound maximised over g).
BoundValue universal_cr_binomial(const BetaPrior& prior, const BinomialChannel& ch,
                                 ScoreMode score = ScoreMode::corrected,
                                 DeltaArgumentOrder order = DeltaArgumentOrder::printed);

using PsiFunction = std::function<double(double x, long y)>;

// Monte-Carlo estimate of |E[(X - g) psi]|^2 / E[psi^2 / Delta(X, g)].  The
// standard error comes from the delta method on the ratio of means.  Throws
// DomainError when the denominator vanishes.
RiskEstimate variational_bound(const Generator& gen, const Prior& prior, const Channel& ch, const EstimatorSpec& est,
                               const PsiFunction& psi, std::size_t n, std::uint64_t seed);

// 1 / E[s^2 / Delta(X, g(Y))] by Monte Carlo, Delta by quadrature per sample.
BoundValue generalized_cr_monte_carlo(const Generator& gen, const Prior& prior, const Channel& ch,
                                      const EstimatorSpec& est, std::size_t n, std::uint64_t seed,
                                      ScoreMode score = ScoreMode::corrected);

}  // namespace bregcr
