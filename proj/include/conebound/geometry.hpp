#pragma once

#include "conebound/charted_map.hpp"
#include "conebound/metric.hpp"
#include "conebound/types.hpp"

#include <cmath>
#include <functional>

namespace conebound {

template <typename T>
struct TensionVector {
    VectorX<T> tau;     // trace of the second fundamental form w.r.t. g
    T energy_density;   // |dphi|^2 at the same point
};

// tau^a = g^{ij} (d_i d_j phi^a - Gamma^k_ij d_k phi^a)
template <typename T>
TensionVector<T> tension_field(const ChartedMap<T>& map, const MetricSample<T>& metric,
                               const VectorX<T>& x) {
    const Jet<T> jet = map.jet(x);
    const Index m = map.dim_domain();
    VectorX<T> tau = VectorX<T>::Zero(map.dim_ambient());
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < m; ++j)
            tau += metric.g_inv(i, j) * jet.d2(i, j);
    for (Index k = 0; k < m; ++k) {
        const T coeff = (metric.g_inv.cwiseProduct(metric.christoffel[static_cast<std::size_t>(k)])).sum();
        tau -= coeff * jet.first.col(k);
    }
    return {tau, energy_density_from_jet(jet, metric)};
}

// Modified Gram-Schmidt with one re-orthogonalization pass; columns of the
// result span the same space orthonormally.
template <typename T>
MatrixX<T> orthonormal_frame(const MatrixX<T>& basis) {
    MatrixX<T> q = basis;
    for (Index i = 0; i < q.cols(); ++i) {
        for (int pass = 0; pass < 2; ++pass)
            for (Index j = 0; j < i; ++j)
                q.col(i) -= q.col(j).dot(q.col(i)) * q.col(j);
        const T norm = q.col(i).norm();
        if (norm < T(1e-300)) throw SingularMetric("degenerate tangent basis");
        q.col(i) /= norm;
    }
    return q;
}

// Normal-space-valued second fundamental form of an immersion, stored like a
// jet: values.col(i*m+j) = II(d_i, d_j).
template <typename T>
struct SecondFundamentalForm {
    MatrixX<T> values;   // n x m*m
    MatrixX<T> frame;    // n x m, orthonormal tangent frame

    Index dim_domain() const { return frame.cols(); }

    auto value(Index i, Index j) const { return values.col(i * dim_domain() + j); }

    // II(W, W) for a chart-coordinate tangent vector W
    VectorX<T> contract(const VectorX<T>& w) const {
        const Index m = dim_domain();
        VectorX<T> out = VectorX<T>::Zero(values.rows());
        for (Index i = 0; i < m; ++i)
            for (Index j = 0; j < m; ++j)
                out += w(i) * w(j) * value(i, j);
        return out;
    }

    VectorX<T> contract(const VectorX<T>& w1, const VectorX<T>& w2) const {
        const Index m = dim_domain();
        VectorX<T> out = VectorX<T>::Zero(values.rows());
        for (Index i = 0; i < m; ++i)
            for (Index j = 0; j < m; ++j)
                out += w1(i) * w2(j) * value(i, j);
        return out;
    }

    // g^{ij} II(d_i, d_j); equals the tension field for isometric immersions
    VectorX<T> trace(const MatrixX<T>& g_inv) const {
        const Index m = dim_domain();
        VectorX<T> out = VectorX<T>::Zero(values.rows());
        for (Index i = 0; i < m; ++i)
            for (Index j = 0; j < m; ++j)
                out += g_inv(i, j) * value(i, j);
        return out;
    }

    T tangential_defect() const {
        return (frame.transpose() * values).template lpNorm<Eigen::Infinity>();
    }
};

template <typename T>
SecondFundamentalForm<T> second_fundamental_form(const ChartedMap<T>& map, const VectorX<T>& x) {
    const Jet<T> jet = map.jet(x);
    const MetricSample<T> metric = pullback_metric(map, x);
    const Index m = map.dim_domain();

    SecondFundamentalForm<T> out;
    out.frame = orthonormal_frame<T>(jet.first);
    out.values.resize(map.dim_ambient(), m * m);
    for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j < m; ++j) {
            VectorX<T> b = jet.d2(i, j);
            for (Index k = 0; k < m; ++k)
                b -= metric.christoffel[static_cast<std::size_t>(k)](i, j) * jet.first.col(k);
            // project off the tangent space; b is already normal up to noise
            b -= out.frame * (out.frame.transpose() * b);
            out.values.col(i * m + j) = b;
        }
    }
    return out;
}

// Gauss-equation sectional curvature of the plane spanned by g-orthonormal
// chart vectors X, Y: <II(X,X), II(Y,Y)> - |II(X,Y)|^2.
template <typename T>
T sectional_curvature(const ChartedMap<T>& map, const VectorX<T>& x, const VectorX<T>& plane_x,
                      const VectorX<T>& plane_y) {
    const MetricSample<T> metric = pullback_metric(map, x);
    const T nx = plane_x.dot(metric.g * plane_x);
    const T ny = plane_y.dot(metric.g * plane_y);
    const T cross = plane_x.dot(metric.g * plane_y);
    if (std::abs(nx - T(1)) > T(1e-8) || std::abs(ny - T(1)) > T(1e-8) ||
        std::abs(cross) > T(1e-8))
        throw DegeneratePlane("plane vectors must be g-orthonormal");

    const SecondFundamentalForm<T> ii = second_fundamental_form(map, x);
    const VectorX<T> xx = ii.contract(plane_x);
    const VectorX<T> yy = ii.contract(plane_y);
    const VectorX<T> xy = ii.contract(plane_x, plane_y);
    return xx.dot(yy) - xy.squaredNorm();
}

// Coordinate Hessian of a scalar field: (Hess f)_ij = d_i d_j f - Gamma^k_ij d_k f.
// Set `orthonormal` to express the result in a g-orthonormal frame.
template <typename T>
MatrixX<T> hessian_scalar(const std::function<T(const VectorX<T>&)>& f,
                          const MetricField<T>& field, const VectorX<T>& x,
                          bool orthonormal = false) {
    const Index m = x.size();
    const T h1 = fd_step_first(x);
    const T h2 = fd_step_second(x);

    VectorX<T> grad(m);
    VectorX<T> xp = x, xm = x;
    for (Index i = 0; i < m; ++i) {
        xp(i) = x(i) + h1;
        xm(i) = x(i) - h1;
        grad(i) = (f(xp) - f(xm)) / (T(2) * h1);
        xp(i) = x(i);
        xm(i) = x(i);
    }

    MatrixX<T> hess(m, m);
    const T f0 = f(x);
    for (Index i = 0; i < m; ++i) {
        xp(i) = x(i) + h2;
        xm(i) = x(i) - h2;
        hess(i, i) = (f(xp) - T(2) * f0 + f(xm)) / (h2 * h2);
        xp(i) = x(i);
        xm(i) = x(i);
    }
    for (Index i = 0; i < m; ++i) {
        for (Index j = i + 1; j < m; ++j) {
            VectorX<T> a = x, b = x, c = x, d = x;
            a(i) += h2; a(j) += h2;
            b(i) += h2; b(j) -= h2;
            c(i) -= h2; c(j) += h2;
            d(i) -= h2; d(j) -= h2;
            const T mixed = (f(a) - f(b) - f(c) + f(d)) / (T(4) * h2 * h2);
            hess(i, j) = mixed;
            hess(j, i) = mixed;
        }
    }

    const auto gamma = christoffel(field, x);
    for (Index k = 0; k < m; ++k) hess -= grad(k) * gamma[static_cast<std::size_t>(k)];

    if (orthonormal) {
        Eigen::LLT<MatrixX<T>> llt(field.value(x));
        if (llt.info() != Eigen::Success) throw SingularMetric("metric not positive-definite");
        // columns of P = L^{-T} are a g-orthonormal basis
        MatrixX<T> p = llt.matrixL()
                           .transpose()
                           .solve(MatrixX<T>::Identity(m, m));
        return p.transpose() * hess * p;
    }
    return hess;
}

// Laplace-Beltrami of a scalar field by finite differences:
// Delta f = g^{ij} (Hess f)_ij.
template <typename T>
T laplace_beltrami(const std::function<T(const VectorX<T>&)>& f, const MetricField<T>& field,
                   const VectorX<T>& x) {
    const MatrixX<T> hess = hessian_scalar<T>(f, field, x, false);
    const MatrixX<T> g = field.value(x);
    return (detail::spd_inverse(g) * hess).trace();
}

}  // namespace conebound
