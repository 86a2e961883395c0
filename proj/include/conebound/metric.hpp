#pragma once

#include "conebound/charted_map.hpp"
#include "conebound/types.hpp"

#include <cmath>
#include <vector>

namespace conebound {

enum class MetricSource { induced, explicit_metric };

// Metric data at one chart point: g, its inverse, and the Christoffel
// symbols of the Levi-Civita connection. christoffel[k](i,j) = Gamma^k_ij.
template <typename T>
struct MetricSample {
    MatrixX<T> g;
    MatrixX<T> g_inv;
    std::vector<MatrixX<T>> christoffel;
    MetricSource source = MetricSource::induced;

    Index dim() const { return g.rows(); }

    T inverse_defect() const {
        return (g * g_inv - MatrixX<T>::Identity(g.rows(), g.cols()))
            .template lpNorm<Eigen::Infinity>();
    }

    T christoffel_asymmetry() const {
        T worst = T(0);
        for (const auto& gk : christoffel)
            worst = std::max(worst, (gk - gk.transpose()).template lpNorm<Eigen::Infinity>());
        return worst;
    }

    bool positive_definite() const {
        Eigen::SelfAdjointEigenSolver<MatrixX<T>> es(g);
        return es.info() == Eigen::Success && es.eigenvalues().minCoeff() > T(0);
    }
};

namespace detail {

template <typename T>
MatrixX<T> spd_inverse(const MatrixX<T>& g) {
    Eigen::LLT<MatrixX<T>> llt(g);
    if (llt.info() != Eigen::Success)
        throw SingularMetric("metric is not positive-definite");
    return llt.solve(MatrixX<T>::Identity(g.rows(), g.cols()));
}

// Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij),
// with dg[k](i,j) = d_k g_ij.
template <typename T>
std::vector<MatrixX<T>> christoffel_from_derivatives(const MatrixX<T>& g_inv,
                                                     const std::vector<MatrixX<T>>& dg) {
    const Index m = g_inv.rows();
    std::vector<MatrixX<T>> gamma(static_cast<std::size_t>(m), MatrixX<T>::Zero(m, m));
    for (Index k = 0; k < m; ++k) {
        for (Index i = 0; i < m; ++i) {
            for (Index j = i; j < m; ++j) {
                T acc = T(0);
                for (Index l = 0; l < m; ++l) {
                    acc += g_inv(k, l) * (dg[static_cast<std::size_t>(i)](j, l) +
                                          dg[static_cast<std::size_t>(j)](i, l) -
                                          dg[static_cast<std::size_t>(l)](i, j));
                }
                acc *= T(0.5);
                gamma[static_cast<std::size_t>(k)](i, j) = acc;
                gamma[static_cast<std::size_t>(k)](j, i) = acc;
            }
        }
    }
    return gamma;
}

}  // namespace detail

// A metric tensor field over the chart domain. `derivative` is optional; when
// absent the Christoffel symbols fall back to central differences of `value`.
template <typename T>
struct MetricField {
    std::function<MatrixX<T>(const VectorX<T>&)> value;
    std::function<std::vector<MatrixX<T>>(const VectorX<T>&)> derivative;
    MetricSource source = MetricSource::explicit_metric;

    MatrixX<T> operator()(const VectorX<T>& x) const { return value(x); }

    MetricSample<T> sample(const VectorX<T>& x) const {
        MetricSample<T> out;
        out.g = value(x);
        out.g_inv = detail::spd_inverse(out.g);
        out.christoffel = detail::christoffel_from_derivatives(out.g_inv, derivatives_at(x));
        out.source = source;
        return out;
    }

    std::vector<MatrixX<T>> derivatives_at(const VectorX<T>& x) const {
        if (derivative) return derivative(x);
        const Index m = x.size();
        const T h = fd_step_first(x);
        std::vector<MatrixX<T>> dg(static_cast<std::size_t>(m));
        VectorX<T> xp = x, xm = x;
        for (Index k = 0; k < m; ++k) {
            xp(k) = x(k) + h;
            xm(k) = x(k) - h;
            dg[static_cast<std::size_t>(k)] = (value(xp) - value(xm)) / (T(2) * h);
            xp(k) = x(k);
            xm(k) = x(k);
        }
        return dg;
    }
};

// In-chart first fundamental form, rank-checked. Throws SingularMetric when
// the differential drops rank (sigma_min < 1e-10 sigma_max).
template <typename T>
MatrixX<T> first_fundamental_form(const Jet<T>& jet) {
    const MatrixX<T>& J = jet.first;
    Eigen::JacobiSVD<MatrixX<T>> svd(J);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(sv.size() - 1) < T(1e-10) * sv(0))
        throw SingularMetric("differential has deficient rank at the sample point");
    return J.transpose() * J;
}

// Induced (pullback) metric at a chart point. Christoffels come from the
// exact jet identity d_k g_ij = <d_k d_i phi, d_j phi> + <d_i phi, d_k d_j phi>
// for analytic jets, and from central differences of g otherwise.
template <typename T>
MetricSample<T> pullback_metric(const ChartedMap<T>& map, const VectorX<T>& x) {
    const Jet<T> jet = map.jet(x);
    const Index m = map.dim_domain();

    MetricSample<T> out;
    out.g = first_fundamental_form(jet);
    out.g_inv = detail::spd_inverse(out.g);
    out.source = MetricSource::induced;

    std::vector<MatrixX<T>> dg(static_cast<std::size_t>(m));
    if (map.jet_kind() == JetKind::analytic) {
        for (Index k = 0; k < m; ++k) {
            MatrixX<T> d = MatrixX<T>::Zero(m, m);
            for (Index i = 0; i < m; ++i)
                for (Index j = 0; j < m; ++j)
                    d(i, j) = jet.d2(k, i).dot(jet.first.col(j)) +
                              jet.first.col(i).dot(jet.d2(k, j));
            dg[static_cast<std::size_t>(k)] = d;
        }
    } else {
        const T h = fd_step_first(x);
        VectorX<T> xp = x, xm = x;
        for (Index k = 0; k < m; ++k) {
            xp(k) = x(k) + h;
            xm(k) = x(k) - h;
            const MatrixX<T> Jp = map.finite_difference_jet(xp).first;
            const MatrixX<T> Jm = map.finite_difference_jet(xm).first;
            dg[static_cast<std::size_t>(k)] =
                (Jp.transpose() * Jp - Jm.transpose() * Jm) / (T(2) * h);
            xp(k) = x(k);
            xm(k) = x(k);
        }
    }
    out.christoffel = detail::christoffel_from_derivatives(out.g_inv, dg);
    return out;
}

// Metric field induced by a map, for operations that need g away from the
// base point (Laplace-Beltrami stencils, Christoffel differencing).
template <typename T>
MetricField<T> induced_metric_field(const ChartedMap<T>& map) {
    MetricField<T> field;
    field.source = MetricSource::induced;
    field.value = [&map](const VectorX<T>& x) { return first_fundamental_form(map.jet(x)); };
    if (map.jet_kind() == JetKind::analytic) {
        field.derivative = [&map](const VectorX<T>& x) {
            const Jet<T> jet = map.jet(x);
            const Index m = map.dim_domain();
            std::vector<MatrixX<T>> dg(static_cast<std::size_t>(m));
            for (Index k = 0; k < m; ++k) {
                MatrixX<T> d = MatrixX<T>::Zero(m, m);
                for (Index i = 0; i < m; ++i)
                    for (Index j = 0; j < m; ++j)
                        d(i, j) = jet.d2(k, i).dot(jet.first.col(j)) +
                                  jet.first.col(i).dot(jet.d2(k, j));
                dg[static_cast<std::size_t>(k)] = d;
            }
            return dg;
        };
    }
    return field;
}

template <typename T>
MetricField<T> euclidean_metric_field(Index m) {
    MetricField<T> field;
    field.source = MetricSource::explicit_metric;
    field.value = [m](const VectorX<T>&) { return MatrixX<T>::Identity(m, m); };
    field.derivative = [m](const VectorX<T>&) {
        return std::vector<MatrixX<T>>(static_cast<std::size_t>(m), MatrixX<T>::Zero(m, m));
    };
    return field;
}

// Christoffel symbols of a metric field at x.
template <typename T>
std::vector<MatrixX<T>> christoffel(const MetricField<T>& field, const VectorX<T>& x) {
    const MatrixX<T> g = field.value(x);
    const MatrixX<T> g_inv = detail::spd_inverse(g);
    return detail::christoffel_from_derivatives(g_inv, field.derivatives_at(x));
}

// |dphi|^2 = g^{ij} <d_i phi, d_j phi>, the squared Hilbert-Schmidt norm of
// the differential. Equals m when the metric is the induced one.
template <typename T>
T energy_density(const ChartedMap<T>& map, const MetricSample<T>& metric, const VectorX<T>& x) {
    const Jet<T> jet = map.jet(x);
    const MatrixX<T> G = jet.first.transpose() * jet.first;
    return (metric.g_inv * G).trace();
}

template <typename T>
T energy_density_from_jet(const Jet<T>& jet, const MetricSample<T>& metric) {
    const MatrixX<T> G = jet.first.transpose() * jet.first;
    return (metric.g_inv * G).trace();
}

}  // namespace conebound
