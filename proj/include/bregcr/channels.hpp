#pragma once

#include "bregcr/priors.hpp"
#include "bregcr/rng.hpp"

#include <cstdint>
#include <variant>
#include <vector>

namespace bregcr {

// Y | X = x ~ Poisson(a x).
struct PoissonChannel {
    double a = 1.0;
};

// Y | X = x ~ Binomial(n, a x), inputs restricted to a x in [0, 1].
struct BinomialChannel {
    int n = 1;
    double a = 1.0;
};

using Channel = std::variant<PoissonChannel, BinomialChannel>;

PoissonChannel make_poisson(double a);
BinomialChannel make_binomial(int n, double a);
void validate(const Channel& channel);
ChannelKind kind_of(const Channel& channel);
std::string describe(const Channel& channel);

bool in_input_domain(const Channel& channel, double x);

double pmf(const PoissonChannel& ch, long y, double x);
double pmf(const BinomialChannel& ch, long y, double x);
double pmf(const Channel& ch, long y, double x);

// Exact draws: inversion for small means, PTRS / BTRS rejection otherwise.
long sample_poisson(double mean, Substream& rng);
long sample_binomial(int n, double p, Substream& rng);
long sample(const Channel& ch, double x, Substream& rng);
long sample(const Channel& ch, double x, std::uint64_t seed);

// E[Y^m | X = x] for 0 <= m <= 6 from the Stirling expansion.
double conditional_moment(const Channel& ch, int m, double x);

// d/dx log P(y | x).
double score_x(const Channel& ch, long y, double x);

// P(Y = y).  Gamma+Poisson is negative binomial; Beta+Binomial is a finite
// positive sum of beta functions; Beta+Poisson falls back to quadrature.
// Throws DomainError for a gamma prior with a binomial channel.
double marginal_pmf(const Prior& prior, const Channel& ch, long y);
// Beta+Binomial through C(n,y) a^y B(alpha+y, beta)/B(alpha, beta) 2F1(y-n, alpha+y; alpha+beta+y; a).
double marginal_pmf_hypergeometric(const BetaPrior& prior, const BinomialChannel& ch, long y);
// Integral of P(y | x) f(x) over the prior support.
double marginal_pmf_quadrature(const Prior& prior, const Channel& ch, long y);

struct MarginalLaw {
    std::vector<double> pmf;  // P(Y = y) for y = 0 .. pmf.size() - 1
    double tail_bound = 0.0;  // certified bound on P(Y >= pmf.size())
};

// Full output law, truncated once the certified tail falls below tail_tol.
MarginalLaw marginal_law(const Prior& prior, const Channel& ch, double tail_tol = 1e-13);

enum class PosteriorMode { closed_form, quadrature };

// E[X | Y = y].  The closed form is (y + theta)/(alpha + a) for Gamma+Poisson
// and the linear MMSE estimator for Beta+Binomial, which is the exact
// posterior mean only when a = 1 or n = 1.
double posterior_mean(const Prior& prior, const Channel& ch, long y, PosteriorMode mode = PosteriorMode::closed_form);

struct LinearCoefficients {
    double c = 0.0;
    double d = 0.0;
};

// Coefficients of the best linear estimator c y + d under squared error.
LinearCoefficients lmmse_coefficients(const Prior& prior, const Channel& ch, MomentMode mode = MomentMode::corrected);

struct LinearityConstant {
    double value = 0.0;
    // True when (theta + n)/((n + 1)(alpha + a)) is non-increasing (theta >= 1),
    // so the value is the supremum over all n, not only n <= n_max.
    bool monotone_certified = false;
};

// sup_{0 <= n <= n_max} |L^(n+1)(a) / ((n+1) L^(n)(a))| for the gamma Laplace
// transform L, which gives E[X | Y = y] <= c (y + 1).
LinearityConstant linearity_constant(const GammaPrior& prior, const PoissonChannel& ch, int n_max);

}  // namespace bregcr
