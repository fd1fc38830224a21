/**
 * @file geometry.hpp
 *
 * Star-like obstacles r(theta)(cos theta, sin theta), the circular
 * measurement curve, their rectangle-rule discretizations, and the 2D
 * radiating fundamental solution Phi(x,y) = (i/4) H^{(1)}_0(k|x-y|).
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "softscat/specfun.hpp"

namespace softscat {

using Point2 = Eigen::Vector2d;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Boundary given by a positive 2pi-periodic radial function.
struct RadialShape {
    std::string name;
    std::function<double(double)> r;
    std::function<double(double)> dr;

    Point2 point(double theta) const { return r(theta) * Point2(std::cos(theta), std::sin(theta)); }
};

/// Quadrature nodes on a closed curve.
struct BoundaryDiscretization {
    std::vector<double> thetas;
    std::vector<Point2> points;
    std::vector<Point2> normals;  ///< outward, unit length
    std::vector<double> weights;  ///< arc-length element times 2pi/n

    std::size_t size() const { return points.size(); }
    double length() const {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }
};

/// Sources/receivers on the circle of radius `radius`.
struct SourceCurve {
    double radius = 0.0;
    int count = 0;
    BoundaryDiscretization nodes;
};

inline const std::vector<std::string>& shape_names() {
    static const std::vector<std::string> names{"circle", "acorn", "flower", "rounded-square"};
    return names;
}

/// Preset obstacles by name. Throws std::invalid_argument for unknown names.
inline RadialShape make_shape(std::string_view name) {
    if (name == "circle") {
        return {"circle", [](double) { return 0.5; }, [](double) { return 0.0; }};
    }
    if (name == "acorn") {
        return {"acorn", [](double t) { return 0.25 * (2.0 + 0.5 * std::cos(3.0 * t)); },
                [](double t) { return -0.375 * std::sin(3.0 * t); }};
    }
    if (name == "flower") {
        return {"flower", [](double t) { return 0.75 * (1.0 - 0.25 * std::sin(4.0 * t)); },
                [](double t) { return -0.75 * std::cos(4.0 * t); }};
    }
    if (name == "rounded-square") {
        // r = 0.5 f^{-1/10}, f = |sin|^10 + |cos|^10 / 10.
        // f' = 10 s^9 c - c^9 s has only integer powers, so it is finite on the axes.
        auto f = [](double t) {
            const double s = std::sin(t), c = std::cos(t);
            return std::pow(s * s, 5) + 0.1 * std::pow(c * c, 5);
        };
        return {"rounded-square", [f](double t) { return 0.5 * std::pow(f(t), -0.1); },
                [f](double t) {
                    const double s = std::sin(t), c = std::cos(t);
                    const double df = 10.0 * std::pow(s, 9) * c - std::pow(c, 9) * s;
                    return -0.05 * std::pow(f(t), -1.1) * df;
                }};
    }
    throw std::invalid_argument("unknown shape '" + std::string(name) +
                                "' (expected circle, acorn, flower or rounded-square)");
}

/// Equispaced nodes theta_i = 2 pi i / n with rectangle-rule arc-length weights.
inline BoundaryDiscretization discretize(const RadialShape& shape, int n) {
    if (n < 8) throw std::invalid_argument("discretize: need at least 8 nodes, got " + std::to_string(n));
    BoundaryDiscretization d;
    d.thetas.reserve(n);
    d.points.reserve(n);
    d.normals.reserve(n);
    d.weights.reserve(n);
    const double h = kTwoPi / n;
    for (int i = 0; i < n; ++i) {
        const double t = h * i;
        const double r = shape.r(t);
        const double dr = shape.dr(t);
        const double s = std::sin(t), c = std::cos(t);
        const double speed = std::hypot(r, dr);
        d.thetas.push_back(t);
        d.points.emplace_back(r * c, r * s);
        d.normals.emplace_back((dr * s + r * c) / speed, (-dr * c + r * s) / speed);
        d.weights.push_back(speed * h);
    }
    return d;
}

inline RadialShape circle_of_radius(double radius) {
    return {"circle", [radius](double) { return radius; }, [](double) { return 0.0; }};
}

inline SourceCurve make_source_curve(double radius, int count) {
    if (!(radius > 0.0)) throw std::invalid_argument("measurement radius must be positive");
    return {radius, count, discretize(circle_of_radius(radius), count)};
}

/// max r(theta) sampled on a fine grid.
inline double circumradius(const RadialShape& shape, int samples = 2048) {
    double best = 0.0;
    for (int i = 0; i < samples; ++i) best = std::max(best, shape.r(kTwoPi * i / samples));
    return best;
}

/// Throws if the measurement circle touches or encloses no gap around the obstacle.
inline void require_separation(const RadialShape& shape, const SourceCurve& gamma) {
    if (circumradius(shape) >= gamma.radius) {
        throw std::invalid_argument("measurement curve must enclose the obstacle with positive distance");
    }
}

/// Distance to the closed obstacle (0 inside), measured against a fine
/// inscribed polygon.
class ObstacleDistance {
public:
    explicit ObstacleDistance(RadialShape shape, int samples = 4096) : shape_(std::move(shape)) {
        polygon_.reserve(static_cast<size_t>(samples) + 1);
        for (int i = 0; i <= samples; ++i) polygon_.push_back(shape_.point(kTwoPi * i / samples));
    }

    double operator()(const Point2& z) const {
        const double tz = std::atan2(z.y(), z.x());
        if (z.norm() <= shape_.r(tz < 0 ? tz + kTwoPi : tz)) return 0.0;
        double best = std::numeric_limits<double>::infinity();
        for (size_t i = 1; i < polygon_.size(); ++i) {
            const Point2 seg = polygon_[i] - polygon_[i - 1];
            const double len2 = seg.squaredNorm();
            const double u = len2 > 0 ? std::clamp((z - polygon_[i - 1]).dot(seg) / len2, 0.0, 1.0) : 0.0;
            best = std::min(best, (z - (polygon_[i - 1] + u * seg)).squaredNorm());
        }
        return std::sqrt(best);
    }

private:
    RadialShape shape_;
    std::vector<Point2> polygon_;
};

inline double distance_to_obstacle(const RadialShape& shape, const Point2& z, int samples = 4096) {
    return ObstacleDistance(shape, samples)(z);
}

namespace detail {
inline double separation(const Point2& x, const Point2& y) {
    const double d = (x - y).norm();
    if (d < 1e-12) throw std::domain_error("fundamental solution evaluated at coincident points");
    return d;
}
}  // namespace detail

/// Phi(x,y) = (i/4) H^{(1)}_0(k|x-y|).
inline cplx fundamental_solution(const Point2& x, const Point2& y, double k) {
    const double d = detail::separation(x, y);
    return cplx(0.0, 0.25) * specfun::hankel1(0, k * d);
}

/// nu . grad_x Phi(x,y) = -(ik/4) H^{(1)}_1(k|x-y|) (x-y).nu / |x-y|.
inline cplx fundamental_solution_dnu(const Point2& x, const Point2& nu, const Point2& y, double k) {
    const double d = detail::separation(x, y);
    return cplx(0.0, -0.25 * k) * specfun::hankel1(1, k * d) * ((x - y).dot(nu) / d);
}

/// Phi and its normal derivative sharing one Hankel evaluation.
struct PhiPair {
    cplx value;
    cplx dnu;
};

inline PhiPair fundamental_solution_pair(const Point2& x, const Point2& nu, const Point2& y, double k) {
    const double d = detail::separation(x, y);
    const auto h = specfun::hankel1_sequence(1, k * d);
    return {cplx(0.0, 0.25) * h[0], cplx(0.0, -0.25 * k) * h[1] * ((x - y).dot(nu) / d)};
}

}  // namespace softscat
