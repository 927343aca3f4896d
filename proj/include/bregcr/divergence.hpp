#pragma once

#include "bregcr/quadrature.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace bregcr {

using Point = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class GeneratorKind {
    squared_mahalanobis,       // u' A u
    neg_entropy,               // u log u on [0, inf)
    binary_logit,              // u log(u / (1 - u)) on [0, 1]
    neg_binomial,              // u log(u / (1 + u)) on [0, inf)
    generalized_i_divergence,  // sum_i u_i log u_i on [0, inf)^n
    custom,
};

std::string to_string(GeneratorKind kind);

struct CustomGenerator {
    std::string name;
    std::size_t dimension = 1;
    std::function<double(const Point&)> value;
    std::function<Point(const Point&)> gradient;
    std::function<Matrix(const Point&)> hessian;
    // Closure of the domain (where phi is finite) and its interior (where the
    // gradient exists).
    std::function<bool(const Point&)> in_domain;
    std::function<bool(const Point&)> in_interior;
};

// Convex generator phi.  Immutable after construction.
class Generator {
public:
    static Generator squared(std::size_t dimension = 1);
    static Generator squared_mahalanobis(Matrix a);
    static Generator neg_entropy();
    static Generator binary_logit();
    static Generator neg_binomial();
    static Generator generalized_i_divergence(std::size_t dimension);
    static Generator custom(CustomGenerator spec);
    // Looks up a built-in by its CLI name (e.g. "neg-entropy"), dimension
    // applying to the vector-valued kinds.
    static Generator by_name(const std::string& name, std::size_t dimension);

    GeneratorKind kind() const { return kind_; }
    std::size_t dimension() const { return dim_; }
    const std::string& name() const { return name_; }

    double value(const Point& u) const;
    Point gradient(const Point& u) const;
    Matrix hessian(const Point& u) const;
    bool in_domain(const Point& u) const;
    bool in_interior(const Point& u) const;

    // Scalar shortcuts for one-dimensional generators.
    double value(double u) const;
    double second_derivative(double u) const;
    bool in_domain(double u) const;
    bool in_interior(double u) const;

    const Matrix& mahalanobis_matrix() const { return a_; }
    const CustomGenerator& custom_spec() const { return custom_; }

private:
    Generator(GeneratorKind kind, std::size_t dim, std::string name) : kind_(kind), dim_(dim), name_(std::move(name)) {}

    GeneratorKind kind_;
    std::size_t dim_;
    std::string name_;
    Matrix a_;
    CustomGenerator custom_;
};

// Generator a*phi1 + b*phi2 on the intersection of the two domains.
Generator combine(double a, const Generator& g1, double b, const Generator& g2);

// l_phi(u, v) = phi(u) - phi(v) - <u - v, grad phi(v)>.  u may sit on the
// boundary when phi extends continuously there; v must be interior.
double bregman(const Generator& gen, const Point& u, const Point& v);
double bregman(const Generator& gen, double u, double v);

// Integral-remainder weight Delta(u, v) = int_0^1 (1 - t) H(v + t (u - v)) dt,
// so that l_phi(u, v) = (u - v)' Delta(u, v) (u - v).
Matrix delta_weight(const Generator& gen, const Point& u, const Point& v, const QuadOptions& opt = {});
double delta_weight(const Generator& gen, double u, double v, const QuadOptions& opt = {});

double l2_form(const Generator& gen, const Point& u, const Point& v, const QuadOptions& opt = {});
double l2_form(const Generator& gen, double u, double v, const QuadOptions& opt = {});

enum class DeltaBoundLevel { linear, quadratic, quadratic_relaxed, cubic };

// Polynomial upper bounds on the inverse Delta weight:
//   neg-entropy, linear:        4u/3 + 2v/3
//   binary-logit, quadratic:    4u/3 + 2v/3 - u^2 - 2uv/3 - v^2/3
//   binary-logit, relaxed:      4u/3 + 2v/3 - u^2
//   binary-logit, cubic:        2 E[T (1 - T)^2],  T = (1 - S) u + S v, S ~ 2(1 - s)
// The polynomial concentrates the Hessian weight at u, so it dominates
// 1 / delta_weight(gen, v, u) (arguments swapped relative to this call).
double delta_inverse_upper(GeneratorKind kind, double u, double v, DeltaBoundLevel level);

enum class BallOrientation { first_argument, second_argument };

struct BallSpec {
    double radius = 0.0;
    Point center;
    BallOrientation orientation = BallOrientation::first_argument;
};

bool ball_contains(const Generator& gen, const BallSpec& ball, const Point& u);

struct BoundaryPoint {
    double angle = 0.0;
    Point point;
    // True when the ray left the domain before the divergence reached the
    // radius; the point is then the domain boundary along the ray.
    bool clipped = false;
};

// Boundary of a two-dimensional ball along `resolution` equally spaced rays.
std::vector<BoundaryPoint> ball_boundary(const Generator& gen, const BallSpec& ball, int resolution);

struct Box {
    Point lower;
    Point upper;
};

struct SandwichConstants {
    double kappa_l = 0.0;
    double kappa_u = 0.0;
};

// Extreme Hessian eigenvalues over a grid on the box (grid points per axis),
// refined by golden-section search for one-dimensional generators.
SandwichConstants sandwich_constants(const Generator& gen, const Box& box, int grid);

}  // namespace bregcr
