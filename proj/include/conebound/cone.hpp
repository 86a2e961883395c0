#pragma once

#include "conebound/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

namespace conebound {

constexpr double kThetaMin = 1e-12;       // width clamp for single-direction inputs
constexpr double kDegenerateSlack = 1e-9; // width >= pi/2 - slack means no cone

// Non-degenerate cone with vertex o, unit axis v and half-angle width in
// (0, pi/2). Membership: <(z-o)/|z-o|, v> >= cos(width).
template <typename T>
struct Cone {
    VectorX<T> vertex;
    VectorX<T> axis;
    T width;

    Cone(VectorX<T> vertex_, VectorX<T> axis_, T width_)
        : vertex(std::move(vertex_)), axis(std::move(axis_)), width(width_) {
        if (std::abs(axis.norm() - T(1)) > T(1e-12))
            throw InvalidParams("cone axis must be a unit vector");
        if (!(width > T(0)) || !(width < T(1.5707963267948966)))
            throw InvalidParams("cone width must lie in (0, pi/2)");
    }

    T cos_width() const { return std::cos(width); }
};

// Unit directions (z - o)/|z - o| of a point set seen from a vertex,
// stored column-wise.
template <typename T>
struct DirectionSet {
    MatrixX<T> directions;
    Index source_count = 0;
};

template <typename T>
bool near_apex(const VectorX<T>& z, const VectorX<T>& o) {
    return (z - o).norm() < T(1e-14) * (T(1) + o.norm());
}

template <typename T>
DirectionSet<T> make_direction_set(const MatrixX<T>& points, const VectorX<T>& o) {
    if (points.cols() == 0) throw EmptyInput("no points supplied");
    DirectionSet<T> set;
    set.directions.resize(points.rows(), points.cols());
    set.source_count = points.cols();
    for (Index k = 0; k < points.cols(); ++k) {
        VectorX<T> d = points.col(k) - o;
        const T r = d.norm();
        if (r < T(1e-14) * (T(1) + o.norm()))
            throw ApexSample("sample point coincides with the cone vertex");
        set.directions.col(k) = d / r;
    }
    return set;
}

template <typename T>
bool cone_contains(const Cone<T>& cone, const VectorX<T>& z) {
    VectorX<T> d = z - cone.vertex;
    const T r = d.norm();
    if (r < T(1e-14) * (T(1) + cone.vertex.norm()))
        throw ApexSample("query point coincides with the cone vertex");
    return d.dot(cone.axis) / r >= cone.cos_width() - T(1e-12);
}

// Sampled distance between phi(M) and the hyperplane through o orthogonal
// to v: min over points of <z - o, v>.
template <typename T>
T plane_distance(const MatrixX<T>& points, const VectorX<T>& o, const VectorX<T>& v) {
    if (points.cols() == 0) throw EmptyInput("no points supplied");
    if (std::abs(v.norm() - T(1)) > T(1e-10))
        throw InvalidParams("plane normal must be a unit vector");
    return ((points.colwise() - o).transpose() * v).minCoeff();
}

namespace detail {

template <typename T>
struct Ball {
    VectorX<T> center;
    T radius2 = T(-1);

    bool contains(const VectorX<T>& p) const {
        if (radius2 < T(0)) return false;
        return (p - center).squaredNorm() <= radius2 + T(1e-13) * (T(1) + radius2);
    }
};

// Smallest ball with every support point on its boundary: the circumball
// within the affine hull of the support set.
template <typename T>
Ball<T> ball_of_support(const MatrixX<T>& pts, const std::vector<Index>& support) {
    Ball<T> ball;
    if (support.empty()) return ball;
    const VectorX<T> p0 = pts.col(support[0]);
    const Index k = static_cast<Index>(support.size()) - 1;
    if (k == 0) {
        ball.center = p0;
        ball.radius2 = T(0);
        return ball;
    }
    MatrixX<T> a(k, k);
    VectorX<T> rhs(k);
    MatrixX<T> span(pts.rows(), k);
    for (Index i = 0; i < k; ++i) span.col(i) = pts.col(support[static_cast<std::size_t>(i) + 1]) - p0;
    for (Index i = 0; i < k; ++i) {
        rhs(i) = span.col(i).squaredNorm();
        for (Index j = 0; j < k; ++j) a(i, j) = T(2) * span.col(i).dot(span.col(j));
    }
    const VectorX<T> lambda = a.colPivHouseholderQr().solve(rhs);
    ball.center = p0 + span * lambda;
    ball.radius2 = (ball.center - p0).squaredNorm();
    return ball;
}

// Welzl's move-to-front smallest enclosing ball. `order` is scanned up to
// `end`; points outside the current ball are promoted to the support set and
// moved to the front.
template <typename T>
Ball<T> mtf_ball(const MatrixX<T>& pts, std::vector<Index>& order, std::size_t end,
                 std::vector<Index>& support) {
    Ball<T> ball = ball_of_support(pts, support);
    if (static_cast<Index>(support.size()) == pts.rows() + 1) return ball;
    for (std::size_t i = 0; i < end; ++i) {
        const Index p = order[i];
        if (!ball.contains(pts.col(p))) {
            support.push_back(p);
            ball = mtf_ball(pts, order, i, support);
            support.pop_back();
            std::rotate(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(i),
                        order.begin() + static_cast<std::ptrdiff_t>(i) + 1);
        }
    }
    return ball;
}

template <typename T>
Ball<T> smallest_enclosing_ball(const MatrixX<T>& pts, std::uint64_t seed) {
    std::vector<Index> order(static_cast<std::size_t>(pts.cols()));
    std::iota(order.begin(), order.end(), Index(0));
    Rng rng(seed);
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng.index(i)]);
    std::vector<Index> support;
    support.reserve(static_cast<std::size_t>(pts.rows()) + 1);
    return mtf_ball(pts, order, order.size(), support);
}

// Largest angle from the axis to any direction, via the chord identity
// |d - v| = 2 sin(angle/2); well-conditioned for near-zero angles where
// acos of a dot product loses half the significant digits.
template <typename T>
T max_angle_to(const MatrixX<T>& directions, const VectorX<T>& axis) {
    T max_chord2 = T(0);
    for (Index k = 0; k < directions.cols(); ++k)
        max_chord2 = std::max(max_chord2, (directions.col(k) - axis).squaredNorm());
    const T half = std::min(std::sqrt(max_chord2) / T(2), T(1));
    return T(2) * std::asin(half);
}

}  // namespace detail

// Minimal-width enclosing cone with a fixed vertex: the smallest spherical
// cap of the direction set, obtained from the smallest enclosing ball of the
// unit directions (cap axis = ball center normalized, width = largest angle
// to the axis).
template <typename T>
Cone<T> min_enclosing_cone(const MatrixX<T>& points, const VectorX<T>& o,
                           std::uint64_t seed = 0) {
    const DirectionSet<T> set = make_direction_set(points, o);
    const detail::Ball<T> ball = detail::smallest_enclosing_ball(set.directions, seed);
    const T center_norm = ball.center.norm();
    if (center_norm < T(1e-12))
        throw DegenerateCone("directions admit no cap smaller than a hemisphere");
    const VectorX<T> axis = ball.center / center_norm;
    T width = detail::max_angle_to(set.directions, axis);
    if (width >= T(1.5707963267948966) - T(kDegenerateSlack))
        throw DegenerateCone("minimal enclosing cap is degenerate");
    width = std::max(width, T(kThetaMin));
    return Cone<T>(o, axis, width);
}

template <typename T>
struct CornerResult {
    bool is_corner = false;
    std::optional<Cone<T>> witness;
    Index dropped = 0;   // input points coinciding with the candidate vertex
};

// A point p is a corner of the set when it is the vertex of a non-degenerate
// cone containing every (distinct) point.
template <typename T>
CornerResult<T> corner_test(const MatrixX<T>& points, const VectorX<T>& p,
                            std::uint64_t seed = 0) {
    if (points.cols() == 0) throw EmptyInput("no points supplied");
    std::vector<Index> keep;
    keep.reserve(static_cast<std::size_t>(points.cols()));
    for (Index k = 0; k < points.cols(); ++k)
        if (!near_apex<T>(points.col(k), p)) keep.push_back(k);

    CornerResult<T> result;
    result.dropped = points.cols() - static_cast<Index>(keep.size());
    if (keep.empty()) throw EmptyInput("all points coincide with the candidate vertex");

    MatrixX<T> kept(points.rows(), static_cast<Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) kept.col(static_cast<Index>(k)) = points.col(keep[k]);

    try {
        result.witness = min_enclosing_cone(kept, p, seed);
        result.is_corner = true;
    } catch (const DegenerateCone&) {
        result.is_corner = false;
    }
    return result;
}

}  // namespace conebound
