#include "bregcr/divergence.hpp"

#include "bregcr/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace bregcr {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

bool scalar_kind(GeneratorKind k) {
    return k == GeneratorKind::neg_entropy || k == GeneratorKind::binary_logit || k == GeneratorKind::neg_binomial;
}

double xlogx(double x) { return x == 0.0 ? 0.0 : x * std::log(x); }

// Scalar generators, one coordinate at a time.

bool scalar_in_domain(GeneratorKind k, double u) {
    if (std::isnan(u)) return false;
    if (k == GeneratorKind::binary_logit) return u >= 0.0 && u <= 1.0;
    return u >= 0.0 && u < inf;
}

bool scalar_in_interior(GeneratorKind k, double u) {
    if (std::isnan(u)) return false;
    if (k == GeneratorKind::binary_logit) return u > 0.0 && u < 1.0;
    return u > 0.0 && u < inf;
}

double scalar_value(GeneratorKind k, double u) {
    switch (k) {
    case GeneratorKind::binary_logit:
        if (u == 1.0) return inf;
        return xlogx(u) - (u == 0.0 ? 0.0 : u * std::log1p(-u));
    case GeneratorKind::neg_binomial:
        return xlogx(u) - (u == 0.0 ? 0.0 : u * std::log1p(u));
    default:
        return xlogx(u);
    }
}

double scalar_gradient(GeneratorKind k, double u) {
    switch (k) {
    case GeneratorKind::binary_logit:
        return std::log(u) - std::log1p(-u) + 1.0 / (1.0 - u);
    case GeneratorKind::neg_binomial:
        return std::log(u) - std::log1p(u) + 1.0 / (1.0 + u);
    default:
        return std::log(u) + 1.0;
    }
}

double scalar_hessian(GeneratorKind k, double u) {
    switch (k) {
    case GeneratorKind::binary_logit: {
        const double w = 1.0 - u;
        return 1.0 / (u * w * w);
    }
    case GeneratorKind::neg_binomial: {
        const double w = 1.0 + u;
        return 1.0 / (u * w * w);
    }
    default:
        return 1.0 / u;
    }
}

// Distance from v to the nearest singularity of the Hessian.
double singular_radius(GeneratorKind k, double v) {
    if (k == GeneratorKind::binary_logit) return std::min(v, 1.0 - v);
    return v;
}

// phi^(m)(v) / m! for m >= 2, from the partial-fraction form of phi''.
double taylor_coefficient(GeneratorKind k, int m, double v) {
    const int j = m - 2;
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    // j! / m! = 1 / (m (m - 1))
    const double scale = 1.0 / (static_cast<double>(m) * (m - 1));
    auto pole = [&](double base, int power) { return std::pow(base, -power); };
    switch (k) {
    case GeneratorKind::binary_logit: {
        const double w = 1.0 - v;
        // d^j/dv^j of 1/v + 1/(1-v) + 1/(1-v)^2
        return scale * (sign * pole(v, j + 1) + pole(w, j + 1) + (j + 1) * pole(w, j + 2));
    }
    case GeneratorKind::neg_binomial: {
        const double w = 1.0 + v;
        // d^j/dv^j of 1/v - 1/(1+v) - 1/(1+v)^2
        return scale * sign * (pole(v, j + 1) - pole(w, j + 1) - (j + 1) * pole(w, j + 2));
    }
    default:
        return scale * sign * pole(v, j + 1);
    }
}

// log1p(q) - q without cancellation for small q.
double log1p_minus(double q) {
    if (std::abs(q) > 0.25) return std::log1p(q) - q;
    double sum = 0.0, qk = q * q;
    for (int k = 2; k < 60; ++k) {
        const double term = qk / k;
        sum += (k % 2 == 0) ? -term : term;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
        qk *= q;
    }
    return sum;
}

double scalar_bregman_closed(GeneratorKind k, double u, double v) {
    const double d = u - v;
    switch (k) {
    case GeneratorKind::binary_logit: {
        if (u == 1.0) return inf;
        const double lv = std::log(v) - std::log1p(-v);
        const double lu = u == 0.0 ? 0.0 : u * (std::log(u) - std::log1p(-u) - lv);
        return lu - d / (1.0 - v);
    }
    case GeneratorKind::neg_binomial: {
        if (u == 0.0) return -d / (1.0 + v);
        // With q = d / (v (1 + u)) the divergence is
        // u (log1p(q) - q) + d^2 / (v (1 + u) (1 + v)); the textbook form
        // cancels badly once u, v >> 1 because phi'' decays like u^-3.
        const double q = d / (v * (1.0 + u));
        return u * log1p_minus(q) + d * d / (v * (1.0 + u) * (1.0 + v));
    }
    default:
        return (u == 0.0 ? 0.0 : u * std::log(u / v)) - d;
    }
}

double scalar_bregman(GeneratorKind k, double u, double v) {
    if (!scalar_in_domain(k, u) || !scalar_in_interior(k, v))
        throw DomainError("bregman: point outside the generator domain");
    const double d = u - v;
    if (d == 0.0) return 0.0;
    const double ratio = std::abs(d) / singular_radius(k, v);
    if (ratio < 0.1) {
        // The closed form cancels catastrophically as u -> v; sum the Taylor
        // series of phi around v instead.
        double sum = 0.0;
        double dm = d * d;
        for (int m = 2; m < 40; ++m) {
            const double term = taylor_coefficient(k, m, v) * dm;
            sum += term;
            if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
            dm *= d;
        }
        return std::max(sum, 0.0);
    }
    return std::max(scalar_bregman_closed(k, u, v), 0.0);
}

double scalar_delta(GeneratorKind k, double u, double v, const QuadOptions& opt) {
    if (!scalar_in_domain(k, u) || !scalar_in_interior(k, v))
        throw DomainError("delta_weight: point outside the generator domain");
    if (u == v) return 0.5 * scalar_hessian(k, v);
    const double d = u - v;
    // t = 1 - s^2 absorbs an integrable Hessian singularity at u (t = 1):
    // (1 - t) H(v + t d) dt = 2 s^3 H(u - s^2 d) ds.
    auto f = [&](double s) {
        const double s2 = s * s;
        const double x = u - s2 * d;
        if (s == 0.0 && !scalar_in_interior(k, x)) return 0.0;
        return 2.0 * s2 * s * scalar_hessian(k, x);
    };
    try {
        return integrate(f, 0.0, 1.0, opt).value;
    } catch (const NonConvergenceError& e) {
        throw SingularityError(std::string("delta_weight: ") + e.what());
    }
}

void check_dimension(const Generator& gen, const Point& u) {
    if (static_cast<std::size_t>(u.size()) != gen.dimension())
        throw DomainError("point dimension does not match the generator");
}

}  // namespace

std::string to_string(GeneratorKind kind) {
    switch (kind) {
    case GeneratorKind::squared_mahalanobis: return "squared-mahalanobis";
    case GeneratorKind::neg_entropy: return "neg-entropy";
    case GeneratorKind::binary_logit: return "binary-logit";
    case GeneratorKind::neg_binomial: return "neg-binomial";
    case GeneratorKind::generalized_i_divergence: return "generalized-i-divergence";
    case GeneratorKind::custom: return "custom";
    }
    return "unknown";
}

Generator Generator::squared(std::size_t dimension) {
    if (dimension == 0) throw DomainError("generator dimension must be positive");
    return squared_mahalanobis(Matrix::Identity(dimension, dimension));
}

Generator Generator::squared_mahalanobis(Matrix a) {
    if (a.rows() == 0 || a.rows() != a.cols()) throw DomainError("Mahalanobis matrix must be square and non-empty");
    if (!a.isApprox(a.transpose(), 1e-12)) throw DomainError("Mahalanobis matrix must be symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0) throw DomainError("Mahalanobis matrix must be positive definite");
    Generator g(GeneratorKind::squared_mahalanobis, static_cast<std::size_t>(a.rows()),
                a.isIdentity(0.0) ? "squared" : "squared-mahalanobis");
    g.a_ = std::move(a);
    return g;
}

Generator Generator::neg_entropy() { return Generator(GeneratorKind::neg_entropy, 1, "neg-entropy"); }
Generator Generator::binary_logit() { return Generator(GeneratorKind::binary_logit, 1, "binary-logit"); }
Generator Generator::neg_binomial() { return Generator(GeneratorKind::neg_binomial, 1, "neg-binomial"); }

Generator Generator::generalized_i_divergence(std::size_t dimension) {
    if (dimension == 0) throw DomainError("generator dimension must be positive");
    return Generator(GeneratorKind::generalized_i_divergence, dimension, "generalized-i-divergence");
}

Generator Generator::custom(CustomGenerator spec) {
    if (spec.dimension == 0) throw DomainError("generator dimension must be positive");
    if (!spec.value || !spec.gradient || !spec.hessian || !spec.in_domain || !spec.in_interior)
        throw DomainError("custom generator needs value, gradient, Hessian and domain callbacks");
    Generator g(GeneratorKind::custom, spec.dimension, spec.name.empty() ? "custom" : spec.name);
    g.custom_ = std::move(spec);
    return g;
}

Generator Generator::by_name(const std::string& name, std::size_t dimension) {
    if (name == "squared") return squared(dimension);
    if (name == "generalized-i-divergence" || name == "gen-i-div") return generalized_i_divergence(dimension);
    if (dimension != 1) throw DomainError("generator '" + name + "' is one-dimensional");
    if (name == "neg-entropy") return neg_entropy();
    if (name == "binary-logit") return binary_logit();
    if (name == "neg-binomial") return neg_binomial();
    throw DomainError("unknown generator '" + name + "'");
}

double Generator::value(const Point& u) const {
    check_dimension(*this, u);
    if (!in_domain(u)) throw DomainError("generator evaluated outside its domain");
    switch (kind_) {
    case GeneratorKind::squared_mahalanobis: return u.dot(a_ * u);
    case GeneratorKind::generalized_i_divergence: {
        double s = 0.0;
        for (Eigen::Index i = 0; i < u.size(); ++i) s += xlogx(u[i]);
        return s;
    }
    case GeneratorKind::custom: return custom_.value(u);
    default: return scalar_value(kind_, u[0]);
    }
}

Point Generator::gradient(const Point& u) const {
    check_dimension(*this, u);
    if (!in_interior(u)) throw DomainError("gradient needs an interior point");
    switch (kind_) {
    case GeneratorKind::squared_mahalanobis: return 2.0 * (a_ * u);
    case GeneratorKind::generalized_i_divergence: return (u.array().log() + 1.0).matrix();
    case GeneratorKind::custom: return custom_.gradient(u);
    default: return Point::Constant(1, scalar_gradient(kind_, u[0]));
    }
}

Matrix Generator::hessian(const Point& u) const {
    check_dimension(*this, u);
    if (!in_interior(u)) throw DomainError("Hessian needs an interior point");
    switch (kind_) {
    case GeneratorKind::squared_mahalanobis: return 2.0 * a_;
    case GeneratorKind::generalized_i_divergence: return u.cwiseInverse().asDiagonal();
    case GeneratorKind::custom: return custom_.hessian(u);
    default: return Matrix::Constant(1, 1, scalar_hessian(kind_, u[0]));
    }
}

bool Generator::in_domain(const Point& u) const {
    if (static_cast<std::size_t>(u.size()) != dim_) return false;
    switch (kind_) {
    case GeneratorKind::squared_mahalanobis: return u.allFinite();
    case GeneratorKind::generalized_i_divergence:
        return std::all_of(u.data(), u.data() + u.size(), [](double x) { return x >= 0.0 && x < inf; });
    case GeneratorKind::custom: return custom_.in_domain(u);
    default: return scalar_in_domain(kind_, u[0]);
    }
}

bool Generator::in_interior(const Point& u) const {
    if (static_cast<std::size_t>(u.size()) != dim_) return false;
    switch (kind_) {
    case GeneratorKind::squared_mahalanobis: return u.allFinite();
    case GeneratorKind::generalized_i_divergence:
        return std::all_of(u.data(), u.data() + u.size(), [](double x) { return x > 0.0 && x < inf; });
    case GeneratorKind::custom: return custom_.in_interior(u);
    default: return scalar_in_interior(kind_, u[0]);
    }
}

double Generator::value(double u) const { return value(Point::Constant(1, u)); }

double Generator::second_derivative(double u) const {
    if (dim_ != 1) throw DomainError("scalar access to a multi-dimensional generator");
    if (scalar_kind(kind_)) {
        if (!scalar_in_interior(kind_, u)) throw DomainError("Hessian needs an interior point");
        return scalar_hessian(kind_, u);
    }
    return hessian(Point::Constant(1, u))(0, 0);
}

bool Generator::in_domain(double u) const { return dim_ == 1 && in_domain(Point::Constant(1, u)); }
bool Generator::in_interior(double u) const { return dim_ == 1 && in_interior(Point::Constant(1, u)); }

Generator combine(double a, const Generator& g1, double b, const Generator& g2) {
    if (g1.dimension() != g2.dimension()) throw DomainError("combine: generator dimensions differ");
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("combine: weights must be positive");
    CustomGenerator spec;
    spec.name = std::to_string(a) + "*" + g1.name() + "+" + std::to_string(b) + "*" + g2.name();
    spec.dimension = g1.dimension();
    spec.value = [=](const Point& u) { return a * g1.value(u) + b * g2.value(u); };
    spec.gradient = [=](const Point& u) -> Point { return a * g1.gradient(u) + b * g2.gradient(u); };
    spec.hessian = [=](const Point& u) -> Matrix { return a * g1.hessian(u) + b * g2.hessian(u); };
    spec.in_domain = [=](const Point& u) { return g1.in_domain(u) && g2.in_domain(u); };
    spec.in_interior = [=](const Point& u) { return g1.in_interior(u) && g2.in_interior(u); };
    return Generator::custom(std::move(spec));
}

double bregman(const Generator& gen, double u, double v) {
    if (gen.dimension() != 1) throw DomainError("scalar bregman on a multi-dimensional generator");
    if (scalar_kind(gen.kind())) return scalar_bregman(gen.kind(), u, v);
    return bregman(gen, Point::Constant(1, u), Point::Constant(1, v));
}

double bregman(const Generator& gen, const Point& u, const Point& v) {
    check_dimension(gen, u);
    check_dimension(gen, v);
    switch (gen.kind()) {
    case GeneratorKind::squared_mahalanobis: {
        if (!u.allFinite() || !v.allFinite()) throw DomainError("bregman: point outside the generator domain");
        const Point d = u - v;
        return std::max(d.dot(gen.mahalanobis_matrix() * d), 0.0);
    }
    case GeneratorKind::generalized_i_divergence: {
        double s = 0.0;
        for (Eigen::Index i = 0; i < u.size(); ++i) s += scalar_bregman(GeneratorKind::neg_entropy, u[i], v[i]);
        return s;
    }
    case GeneratorKind::custom: {
        if (!gen.in_domain(u) || !gen.in_interior(v)) throw DomainError("bregman: point outside the generator domain");
        const double l = gen.value(u) - gen.value(v) - (u - v).dot(gen.gradient(v));
        return std::max(l, 0.0);
    }
    default: return scalar_bregman(gen.kind(), u[0], v[0]);
    }
}

double delta_weight(const Generator& gen, double u, double v, const QuadOptions& opt) {
    if (gen.dimension() != 1) throw DomainError("scalar delta_weight on a multi-dimensional generator");
    if (scalar_kind(gen.kind())) return scalar_delta(gen.kind(), u, v, opt);
    return delta_weight(gen, Point::Constant(1, u), Point::Constant(1, v), opt)(0, 0);
}

Matrix delta_weight(const Generator& gen, const Point& u, const Point& v, const QuadOptions& opt) {
    check_dimension(gen, u);
    check_dimension(gen, v);
    const auto n = static_cast<Eigen::Index>(gen.dimension());
    switch (gen.kind()) {
    case GeneratorKind::squared_mahalanobis:
        if (!u.allFinite() || !v.allFinite()) throw DomainError("delta_weight: point outside the generator domain");
        return gen.mahalanobis_matrix();
    case GeneratorKind::generalized_i_divergence: {
        Matrix m = Matrix::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) m(i, i) = scalar_delta(GeneratorKind::neg_entropy, u[i], v[i], opt);
        return m;
    }
    case GeneratorKind::custom: {
        if (!gen.in_domain(u) || !gen.in_interior(v))
            throw DomainError("delta_weight: point outside the generator domain");
        const Point d = u - v;
        Matrix m(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = i; j < n; ++j) {
                auto f = [&](double s) {
                    const double s2 = s * s;
                    const Point x = u - s2 * d;
                    if (s == 0.0 && !gen.in_interior(x)) return 0.0;
                    return 2.0 * s2 * s * gen.hessian(x)(i, j);
                };
                try {
                    m(i, j) = m(j, i) = integrate(f, 0.0, 1.0, opt).value;
                } catch (const NonConvergenceError& e) {
                    throw SingularityError(std::string("delta_weight: ") + e.what());
                }
            }
        }
        return m;
    }
    default: return Matrix::Constant(1, 1, scalar_delta(gen.kind(), u[0], v[0], opt));
    }
}

double l2_form(const Generator& gen, double u, double v, const QuadOptions& opt) {
    const double d = u - v;
    return d * d * delta_weight(gen, u, v, opt);
}

double l2_form(const Generator& gen, const Point& u, const Point& v, const QuadOptions& opt) {
    const Point d = u - v;
    return d.dot(delta_weight(gen, u, v, opt) * d);
}

double delta_inverse_upper(GeneratorKind kind, double u, double v, DeltaBoundLevel level) {
    if (std::isnan(u) || std::isnan(v)) throw DomainError("delta_inverse_upper: NaN argument");
    if (kind == GeneratorKind::neg_entropy) {
        if (level != DeltaBoundLevel::linear) throw DomainError("neg-entropy only has the linear bound");
        if (!(u > 0.0) || !(v >= 0.0) || !std::isfinite(u) || !std::isfinite(v))
            throw DomainError("neg-entropy bound needs u > 0, v >= 0");
        return 4.0 * u / 3.0 + 2.0 * v / 3.0;
    }
    if (kind == GeneratorKind::binary_logit) {
        if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0))
            throw DomainError("binary-logit bound needs u, v in [0, 1]");
        switch (level) {
        case DeltaBoundLevel::quadratic:
            return 4.0 * u / 3.0 + 2.0 * v / 3.0 - u * u - 2.0 * u * v / 3.0 - v * v / 3.0;
        case DeltaBoundLevel::quadratic_relaxed:
            return 4.0 * u / 3.0 + 2.0 * v / 3.0 - u * u;
        case DeltaBoundLevel::cubic:
            return (12.0 * u * u * u + u * u * (9.0 * v - 30.0) + u * (6.0 * v * v - 20.0 * v + 20.0) +
                    v * (3.0 * v * v - 10.0 * v + 10.0)) /
                   15.0;
        case DeltaBoundLevel::linear:
            break;
        }
        throw DomainError("binary-logit has quadratic and cubic bounds only");
    }
    throw DomainError("delta_inverse_upper supports neg-entropy and binary-logit");
}

namespace {

double ball_divergence(const Generator& gen, const BallSpec& ball, const Point& u) {
    if (ball.orientation == BallOrientation::first_argument) return bregman(gen, u, ball.center);
    if (!gen.in_interior(u)) return inf;
    return bregman(gen, ball.center, u);
}

void check_ball(const Generator& gen, const BallSpec& ball) {
    if (!(ball.radius >= 0.0)) throw DomainError("ball radius must be non-negative");
    check_dimension(gen, ball.center);
    if (!gen.in_interior(ball.center)) throw DomainError("ball center must be interior to the domain");
}

}  // namespace

bool ball_contains(const Generator& gen, const BallSpec& ball, const Point& u) {
    check_ball(gen, ball);
    check_dimension(gen, u);
    if (!gen.in_domain(u)) throw DomainError("ball_contains: point outside the generator domain");
    return ball_divergence(gen, ball, u) <= ball.radius;
}

std::vector<BoundaryPoint> ball_boundary(const Generator& gen, const BallSpec& ball, int resolution) {
    if (gen.dimension() != 2) throw DomainError("ball boundary needs a two-dimensional generator");
    if (resolution < 1) throw DomainError("ball boundary resolution must be positive");
    check_ball(gen, ball);

    // Along a ray from the center both orientations grow monotonically in the
    // step length, so the boundary is bracketed and then bisected.
    auto usable = [&](const Point& x) {
        return ball.orientation == BallOrientation::first_argument ? gen.in_domain(x) : gen.in_interior(x);
    };
    std::vector<BoundaryPoint> out;
    out.reserve(static_cast<std::size_t>(resolution));
    const double scale = std::max({1.0, ball.center.norm(), std::sqrt(ball.radius)});
    for (int k = 0; k < resolution; ++k) {
        const double angle = 2.0 * std::numbers::pi * k / resolution;
        Point dir(2);
        dir << std::cos(angle), std::sin(angle);
        auto at = [&](double s) -> Point { return ball.center + s * dir; };
        auto excess = [&](double s) { return ball_divergence(gen, ball, at(s)) - ball.radius; };

        BoundaryPoint bp;
        bp.angle = angle;
        double lo = 0.0;
        double hi = 1e-3 * scale;
        bool bracketed = false;
        bool left_domain = false;
        for (int it = 0; it < 200; ++it) {
            const Point x = at(hi);
            if (!usable(x)) {
                left_domain = true;
                break;
            }
            if (excess(hi) >= 0.0) {
                bracketed = true;
                break;
            }
            lo = hi;
            hi *= 2.0;
        }
        if (left_domain) {
            // Locate the domain edge along the ray, then see whether the ball
            // closes before it.
            double in = lo, out_s = hi;
            for (int it = 0; it < 200 && out_s - in > 1e-15 * std::max(1.0, out_s); ++it) {
                const double mid = 0.5 * (in + out_s);
                (usable(at(mid)) ? in : out_s) = mid;
            }
            if (excess(in) < 0.0) {
                bp.point = at(in);
                bp.clipped = true;
                out.push_back(std::move(bp));
                continue;
            }
            hi = in;
            bracketed = true;
        }
        if (!bracketed) throw NonConvergenceError("ball boundary: ray did not reach the radius");
        for (int it = 0; it < 200 && hi - lo > 4e-16 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (excess(mid) < 0.0 ? lo : hi) = mid;
        }
        const double e_lo = std::abs(excess(lo));
        const double e_hi = std::abs(excess(hi));
        bp.point = at(e_lo < e_hi ? lo : hi);
        out.push_back(std::move(bp));
    }
    return out;
}

SandwichConstants sandwich_constants(const Generator& gen, const Box& box, int grid) {
    check_dimension(gen, box.lower);
    check_dimension(gen, box.upper);
    if (grid < 1) throw DomainError("sandwich grid must be positive");
    const auto n = static_cast<Eigen::Index>(gen.dimension());
    for (Eigen::Index i = 0; i < n; ++i)
        if (!(box.lower[i] < box.upper[i])) throw DomainError("degenerate sandwich box");
    if (!gen.in_interior(box.lower) || !gen.in_interior(box.upper))
        throw DomainError("sandwich box must be interior to the domain");

    auto eigen_range = [&](const Point& x) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(gen.hessian(x), Eigen::EigenvaluesOnly);
        return std::pair{es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
    };

    SandwichConstants k{inf, -inf};
    Point best_min = box.lower, best_max = box.lower;
    const int per_axis = grid == 1 ? 1 : grid;
    long total = 1;
    for (Eigen::Index i = 0; i < n; ++i) total *= per_axis;
    Point x(n);
    for (long idx = 0; idx < total; ++idx) {
        long rem = idx;
        for (Eigen::Index i = 0; i < n; ++i) {
            const long j = rem % per_axis;
            rem /= per_axis;
            x[i] = per_axis == 1 ? 0.5 * (box.lower[i] + box.upper[i])
                                 : box.lower[i] + (box.upper[i] - box.lower[i]) * j / (per_axis - 1);
        }
        const auto [lo, hi] = eigen_range(x);
        if (lo < k.kappa_l) {
            k.kappa_l = lo;
            best_min = x;
        }
        if (hi > k.kappa_u) {
            k.kappa_u = hi;
            best_max = x;
        }
    }

    if (n == 1) {
        // Golden-section refinement within the grid cell around each extremum.
        const double step = per_axis == 1 ? box.upper[0] - box.lower[0]
                                          : (box.upper[0] - box.lower[0]) / (per_axis - 1);
        auto refine = [&](double centre, bool minimise) {
            double a = std::max(box.lower[0], centre - step);
            double b = std::min(box.upper[0], centre + step);
            auto f = [&](double t) {
                const auto [lo, hi] = eigen_range(Point::Constant(1, t));
                return minimise ? lo : -hi;
            };
            const double r = 0.5 * (std::sqrt(5.0) - 1.0);
            double c = b - r * (b - a), d = a + r * (b - a);
            double fc = f(c), fd = f(d);
            for (int it = 0; it < 200 && b - a > 1e-14 * std::max(1.0, std::abs(b)); ++it) {
                if (fc < fd) {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - r * (b - a);
                    fc = f(c);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + r * (b - a);
                    fd = f(d);
                }
            }
            return std::min(fc, fd);
        };
        k.kappa_l = std::min(k.kappa_l, refine(best_min[0], true));
        k.kappa_u = std::max(k.kappa_u, -refine(best_max[0], false));
    }
    return k;
}

}  // namespace bregcr
