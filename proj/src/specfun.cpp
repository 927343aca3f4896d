#include "bregcr/specfun.hpp"

#include "bregcr/errors.hpp"
#include "bregcr/quadrature.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace bregcr {

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;

// zeta(k) - 1 for k = 2..41.
constexpr std::array<double, 40> kZetaMinusOne = {
    6.44934066848226406e-01, 2.02056903159594292e-01, 8.23232337111381857e-02,
    3.69277551433699266e-02, 1.73430619844491402e-02, 8.34927738192282713e-03,
    4.07735619794433960e-03, 2.00839282608221426e-03, 9.94575127818085256e-04,
    4.94188604119464529e-04, 2.46086553308048320e-04, 1.22713347578489145e-04,
    6.12481350587048277e-05, 3.05882363070204933e-05, 1.52822594086518710e-05,
    7.63719763789976257e-06, 3.81729326499984022e-06, 1.90821271655393897e-06,
    9.53962033872796212e-07, 4.76932986787806447e-07, 2.38450502727733004e-07,
    1.19219925965311064e-07, 5.96081890512594801e-08, 2.98035035146522793e-08,
    1.49015548283650427e-08, 7.45071178983543006e-09, 3.72533402478845728e-09,
    1.86265972351304914e-09, 9.31327432419668166e-10, 4.65662906503378366e-10,
    2.32831183367650534e-10, 1.16415501727005193e-10, 5.82077208790270145e-11,
    2.91038504449710001e-11, 1.45519218910419849e-11, 7.27595983505748180e-12,
    3.63797954737865086e-12, 1.81898965030706607e-12, 9.09494784026388841e-13,
    4.54747378304215422e-13};

// ln Gamma(2 + z) = (1 - gamma) z + sum_k (-1)^k (zeta(k) - 1) z^k / k, |z| <= 1/2.
double log_gamma_near_two(double z) {
    double s = 0.0;
    double zk = -z;
    for (std::size_t i = 0; i < kZetaMinusOne.size(); ++i) {
        zk *= -z;  // (-z)^k for k = i + 2
        s += kZetaMinusOne[i] * zk / static_cast<double>(i + 2);
    }
    return (1.0 - kEulerGamma) * z + s;
}

// Lanczos approximation, g = 607/128, 15 terms.
constexpr double kLanczosG = 607.0 / 128.0;
constexpr std::array<double, 15> kLanczos = {
    0.99999999999999709182,     57.156235665862923517,      -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978,    .33994649984811888699e-4,
    .46523628927048575665e-4,   -.98374475304879564677e-4,  .15808870322491248884e-3,
    -.21026444172410488319e-3,  .21743961811521264320e-3,   -.16431810653676389022e-3,
    .84418223983852743293e-4,   -.26190838401581408670e-4,  .36899182659531622704e-5};

double log_gamma_lanczos(double x) {
    const double z = x - 1.0;
    double sum = kLanczos[0];
    for (std::size_t k = 1; k < kLanczos.size(); ++k) sum += kLanczos[k] / (z + static_cast<double>(k));
    const double t = z + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(sum);
}

// Root of digamma, split into high and low parts, and Taylor coefficients
// psi^(k)(x0)/k! for k = 1..7.
constexpr double kDigammaRootHi = 1.4616321449683622;
constexpr double kDigammaRootLo = 9.549995429965697e-17;
constexpr std::array<double, 7> kDigammaRootTaylor = {
    9.67672245447621204e-01, -4.42763168983592081e-01, 2.58499760955651026e-01,
    -1.63942705442406522e-01, 1.07824050691262371e-01, -7.21995612564547140e-02,
    4.88042881641431101e-02};

// ln|Gamma(x)| and sign for any non-pole real x.
struct SignedLog {
    double log_abs;
    int sign;
};

SignedLog signed_log_gamma(double x) {
    if (x > 0.0) return {log_gamma(x), 1};
    if (x == std::floor(x)) return {std::numeric_limits<double>::infinity(), 0};
    const double s = std::sin(std::numbers::pi * x);
    SignedLog rest = signed_log_gamma(1.0 - x);
    return {std::log(std::numbers::pi / std::abs(s)) - rest.log_abs, (s > 0.0 ? 1 : -1) * rest.sign};
}

bool is_nonpositive_integer(double v) { return v <= 0.0 && v == std::floor(v); }

double gauss_summation(double a, double b, double c) {
    // Gamma(c) Gamma(c-a-b) / (Gamma(c-a) Gamma(c-b)), valid for c - a - b > 0.
    const SignedLog ca = signed_log_gamma(c - a);
    const SignedLog cb = signed_log_gamma(c - b);
    if (ca.sign == 0 || cb.sign == 0) return 0.0;
    const SignedLog gc = signed_log_gamma(c);
    const SignedLog gcab = signed_log_gamma(c - a - b);
    const int sign = gc.sign * gcab.sign * ca.sign * cb.sign;
    return sign * std::exp(gc.log_abs + gcab.log_abs - ca.log_abs - cb.log_abs);
}

}  // namespace

double log_gamma(double x) {
    if (!(x > 0.0)) throw DomainError("log_gamma: argument must be positive, got " + std::to_string(x));
    if (std::isinf(x)) return x;
    if (x < 0.5) return log_gamma_near_two(x) - std::log(x) - std::log1p(x);
    if (x < 1.5) return log_gamma_near_two(x - 1.0) - std::log1p(x - 1.0);
    if (x <= 2.5) return log_gamma_near_two(x - 2.0);
    return log_gamma_lanczos(x);
}

double digamma(double x) {
    if (!(x > 0.0)) throw DomainError("digamma: argument must be positive, got " + std::to_string(x));
    const double d = (x - kDigammaRootHi) - kDigammaRootLo;
    if (std::abs(d) < 5e-3) {
        double s = 0.0;
        for (std::size_t k = kDigammaRootTaylor.size(); k-- > 0;) s = (s + kDigammaRootTaylor[k]) * d;
        return s;
    }
    double shift = 0.0;
    while (x < 10.0) {
        shift -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    const double series =
        inv2 * (1.0 / 12 -
                inv2 * (1.0 / 120 -
                        inv2 * (1.0 / 252 -
                                inv2 * (1.0 / 240 -
                                        inv2 * (1.0 / 132 - inv2 * (691.0 / 32760 - inv2 / 12.0))))));
    return shift + std::log(x) - 0.5 * inv - series;
}

double log_beta(double a, double b) { return log_gamma(a) + log_gamma(b) - log_gamma(a + b); }

double gauss_2f1_series(double a, double b, double c, double z) {
    if (is_nonpositive_integer(c)) throw DomainError("gauss_2f1: c is a non-positive integer");
    double term = 1.0;
    double sum = 1.0;
    const double settle = std::max({std::abs(a), std::abs(b), std::abs(c)}) + 2.0;
    for (int k = 0; k < 1000000; ++k) {
        const double kk = static_cast<double>(k);
        const double ratio = (a + kk) * (b + kk) / ((c + kk) * (kk + 1.0)) * z;
        term *= ratio;
        if (term == 0.0) return sum;
        sum += term;
        if (kk > settle) {
            const double r_next = std::abs((a + kk + 1) * (b + kk + 1) / ((c + kk + 1) * (kk + 2.0)) * z);
            const double r_bound = std::max(r_next, std::abs(z));
            if (r_bound < 1.0) {
                const double tail = std::abs(term) * r_next / (1.0 - r_bound);
                if (tail <= 1e-16 * std::abs(sum)) return sum;
            }
        }
    }
    throw NonConvergenceError("gauss_2f1: power series did not converge within 10^6 terms");
}

double gauss_2f1_euler(double a, double b, double c, double z) {
    if (!(c > b && b > 0.0)) {
        if (c > a && a > 0.0) {
            std::swap(a, b);
        } else {
            throw DomainError("gauss_2f1: Euler integral needs c > b > 0 for one of the numerator parameters");
        }
    }
    if (z == 1.0 && !(c - a - b > 0.0)) return std::numeric_limits<double>::infinity();
    QuadOptions opt;
    opt.rel_tol = 1e-13;
    auto kernel = [&](double t) { return std::pow(1.0 - z * t, -a); };
    return integrate_beta_kernel(kernel, b, c - b, opt).value * std::exp(-log_beta(b, c - b));
}

double gauss_2f1(double a, double b, double c, double z) {
    if (std::isnan(a) || std::isnan(b) || std::isnan(c) || std::isnan(z))
        throw DomainError("gauss_2f1: NaN argument");
    if (!(z >= 0.0 && z <= 1.0)) throw DomainError("gauss_2f1: z must lie in [0, 1]");
    if (is_nonpositive_integer(c)) throw DomainError("gauss_2f1: c is a non-positive integer");
    if (z == 0.0 || a == 0.0 || b == 0.0) return 1.0;
    const bool terminating = is_nonpositive_integer(a) || is_nonpositive_integer(b);
    if (terminating || z <= 0.9) return gauss_2f1_series(a, b, c, z);
    if (z == 1.0) {
        if (c - a - b > 0.0) return gauss_summation(a, b, c);
        if (a > 0.0 && b > 0.0 && c > 0.0) return std::numeric_limits<double>::infinity();
        throw DomainError("gauss_2f1: divergent at z = 1 (c - a - b <= 0)");
    }
    if ((c > b && b > 0.0) || (c > a && a > 0.0)) return gauss_2f1_euler(a, b, c, z);
    return gauss_2f1_series(a, b, c, z);
}

StirlingCount stirling2(int m, int k) {
    if (m < 0) throw DomainError("stirling2: m must be non-negative");
    if (m > 64) throw OverflowError("stirling2: exactness cap is m <= 64");
    if (k < 0 || k > m) return 0;
    std::array<StirlingCount, 65> row{};
    row[0] = 1;
    for (int i = 1; i <= m; ++i) {
        for (int j = std::min(i, k); j >= 1; --j) row[j] = StirlingCount(j) * row[j] + row[j - 1];
        row[0] = 0;
    }
    return row[k];
}

double stirling2_real(int m, int k) { return stirling2(m, k).convert_to<double>(); }

double falling_factorial(double n, int k) {
    if (k < 0) return 0.0;
    double p = 1.0;
    for (int i = 0; i < k; ++i) p *= n - static_cast<double>(i);
    return p;
}

QuadratureRule gauss_legendre(int order) {
    if (order < 1 || order > 256)
        throw UnsupportedError("gauss_legendre: order must lie in [1, 256], got " + std::to_string(order));
    QuadratureRule rule;
    rule.order = order;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= order; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                // One more derivative evaluation at the converged node.
                double q0 = 1.0, q1 = x;
                for (int j = 2; j <= order; ++j) {
                    const double q2 = ((2.0 * j - 1.0) * x * q1 - (j - 1.0) * q0) / j;
                    q0 = q1;
                    q1 = q2;
                }
                dp = order * (x * q1 - q0) / (x * x - 1.0);
                break;
            }
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[order - 1 - i] = x;
        rule.nodes[i] = -x;
        rule.weights[i] = w;
        rule.weights[order - 1 - i] = w;
    }
    if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
    return rule;
}

}  // namespace bregcr
