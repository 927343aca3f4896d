#pragma once

#include "bregcr/rng.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace bregcr {

// Gamma(rate alpha, shape theta): f(x) = alpha^theta x^(theta-1) e^(-alpha x) / Gamma(theta).
struct GammaPrior {
    double alpha = 1.0;
    double theta = 1.0;
};

struct BetaPrior {
    double alpha = 1.0;
    double beta = 1.0;
};

using Prior = std::variant<GammaPrior, BetaPrior>;

// Validates parameters; throws DomainError.
GammaPrior make_gamma(double alpha, double theta);
BetaPrior make_beta(double alpha, double beta);
void validate(const Prior& prior);

std::string describe(const Prior& prior);

// How beta second moments and scores are computed.  `paper_verbatim`
// reproduces the printed expressions used for figure reproduction:
//   E[X^2] = (a+2)(a+1) / ((a+b+2)(a+b+1)),  rho = (a-1)/x - (1-b)/(1-x).
// The variance keeps its closed form ab/((a+b)^2 (a+b+1)) in both modes.
enum class MomentMode { corrected, paper_verbatim };
enum class ScoreMode { corrected, paper_verbatim };

double pdf(const GammaPrior& p, double x);
double pdf(const BetaPrior& p, double x);
double pdf(const Prior& p, double x);

double cdf(const Prior& p, double x);

double mean(const Prior& p);
double variance(const Prior& p);

double sample(const GammaPrior& p, Substream& rng);
double sample(const BetaPrior& p, Substream& rng);
double sample(const Prior& p, Substream& rng);
// Draw i comes from Substream(seed, i).
std::vector<double> sample(const Prior& p, std::size_t count, std::uint64_t seed);

// E[X^k] for real k; +infinity when the integral diverges.
double moment(const GammaPrior& p, double k);
double moment(const BetaPrior& p, double k, MomentMode mode = MomentMode::corrected);
double moment(const Prior& p, double k, MomentMode mode = MomentMode::corrected);

// E[X^j (1 - X)^l] for a beta prior; +infinity when divergent.
double beta_mixed_moment(const BetaPrior& p, double j, double l);

// rho(x) = f'(x) / f(x) on the interior of the support.
double score(const GammaPrior& p, double x);
double score(const BetaPrior& p, double x, ScoreMode mode = ScoreMode::corrected);
double score(const Prior& p, double x, ScoreMode mode = ScoreMode::corrected);

// E[rho(X)^2 X^k]; +infinity when divergent.
double score_weighted_moment(const GammaPrior& p, double k);
double score_weighted_moment(const BetaPrior& p, double k, ScoreMode mode = ScoreMode::corrected);
double score_weighted_moment(const Prior& p, double k, ScoreMode mode = ScoreMode::corrected);

// E[X^k / (1 - aX)^m] = B(alpha+k, beta)/B(alpha, beta) * 2F1(m, alpha+k; alpha+beta+k; a).
// Throws MomentDivergenceError when alpha + k <= 0; +infinity at a = 1 when m >= beta.
double hypergeometric_moment(const BetaPrior& p, double k, double m, double a);

enum class LogMomentKind { x_log_x, x_logit };

// E[X log X] (both priors) or E[X log(X / (1 - X))] (beta only).
double log_moment(const Prior& p, LogMomentKind kind);

enum class ChannelKind { poisson, binomial };

struct RegularityReport {
    bool holds = false;
    // Set when the prior's support does not match the channel's input domain
    // but the pairing is still admitted (beta prior with a Poisson channel).
    bool support_warning = false;
    std::vector<std::string> reasons;
};

// Density limits at the support endpoints required by the integration by
// parts behind the CR bounds.  Throws DomainError for a gamma prior with a
// binomial channel.
RegularityReport regularity_check(const Prior& p, ChannelKind channel);

}  // namespace bregcr
