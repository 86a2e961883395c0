#pragma once

#include "conebound/types.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <utility>

namespace conebound {

enum class JetKind { analytic, finite_difference };

// Finite-difference step sizes balancing truncation against rounding.
template <typename T>
T fd_step_first(const VectorX<T>& x) {
    const T eps = std::numeric_limits<T>::epsilon();
    return std::cbrt(eps) * std::max(T(1), x.norm());
}

template <typename T>
T fd_step_second(const VectorX<T>& x) {
    const T eps = std::numeric_limits<T>::epsilon();
    return std::pow(eps, T(0.25)) * std::max(T(1), x.norm());
}

// Second-order jet of a map R^m -> R^n at a chart point.
// first.col(i) = d_i phi; second column (i*m + j) = d_i d_j phi.
template <typename T>
struct Jet {
    VectorX<T> value;    // n
    MatrixX<T> first;    // n x m
    MatrixX<T> second;   // n x m*m

    Index dim_domain() const { return first.cols(); }
    Index dim_ambient() const { return first.rows(); }

    auto d2(Index i, Index j) const { return second.col(i * dim_domain() + j); }

    // max asymmetry |d2(i,j) - d2(j,i)| over index pairs
    T symmetry_defect() const {
        const Index m = dim_domain();
        T worst = T(0);
        for (Index i = 0; i < m; ++i)
            for (Index j = i + 1; j < m; ++j)
                worst = std::max(worst, (d2(i, j) - d2(j, i)).template lpNorm<Eigen::Infinity>());
        return worst;
    }
};

// A smooth map from an m-dimensional chart domain into R^n with second-order
// derivative access. Immutable after construction; jets are either supplied
// analytically or synthesized by central differences of `evaluate`.
template <typename T>
class ChartedMap {
public:
    using EvalFn = std::function<VectorX<T>(const VectorX<T>&)>;
    using JetFn = std::function<Jet<T>(const VectorX<T>&)>;

    ChartedMap(Index dim_domain, Index dim_ambient, EvalFn evaluate, Box<T> domain_box)
        : m_(dim_domain),
          n_(dim_ambient),
          eval_(std::move(evaluate)),
          box_(std::move(domain_box)),
          kind_(JetKind::finite_difference) {
        if (m_ < 1 || n_ < 1) throw InvalidParams("ChartedMap: dimensions must be positive");
    }

    ChartedMap(Index dim_domain, Index dim_ambient, EvalFn evaluate, JetFn analytic_jet,
               Box<T> domain_box)
        : m_(dim_domain),
          n_(dim_ambient),
          eval_(std::move(evaluate)),
          jet_(std::move(analytic_jet)),
          box_(std::move(domain_box)),
          kind_(JetKind::analytic) {
        if (m_ < 1 || n_ < 1) throw InvalidParams("ChartedMap: dimensions must be positive");
    }

    Index dim_domain() const { return m_; }
    Index dim_ambient() const { return n_; }
    JetKind jet_kind() const { return kind_; }
    const Box<T>& domain_box() const { return box_; }

    VectorX<T> operator()(const VectorX<T>& x) const { return eval_(x); }
    VectorX<T> evaluate(const VectorX<T>& x) const { return eval_(x); }

    Jet<T> jet(const VectorX<T>& x) const {
        if (kind_ == JetKind::analytic) return jet_(x);
        return finite_difference_jet(x);
    }

    // Central-difference jet, usable regardless of jet_kind (it backs the
    // consistency checks for maps that also carry analytic jets).
    Jet<T> finite_difference_jet(const VectorX<T>& x) const {
        const T h1 = fd_step_first(x);
        const T h2 = fd_step_second(x);
        Jet<T> out;
        out.value = eval_(x);
        out.first.resize(n_, m_);
        out.second.resize(n_, m_ * m_);

        VectorX<T> xp = x, xm = x;
        for (Index i = 0; i < m_; ++i) {
            xp(i) = x(i) + h1;
            xm(i) = x(i) - h1;
            out.first.col(i) = (eval_(xp) - eval_(xm)) / (T(2) * h1);
            xp(i) = x(i);
            xm(i) = x(i);
        }
        for (Index i = 0; i < m_; ++i) {
            xp(i) = x(i) + h2;
            xm(i) = x(i) - h2;
            out.second.col(i * m_ + i) = (eval_(xp) - T(2) * out.value + eval_(xm)) / (h2 * h2);
            xp(i) = x(i);
            xm(i) = x(i);
        }
        // mixed partials by the four-point stencil, symmetric by construction
        for (Index i = 0; i < m_; ++i) {
            for (Index j = i + 1; j < m_; ++j) {
                VectorX<T> a = x, b = x, c = x, d = x;
                a(i) += h2; a(j) += h2;
                b(i) += h2; b(j) -= h2;
                c(i) -= h2; c(j) += h2;
                d(i) -= h2; d(j) -= h2;
                VectorX<T> mixed = (eval_(a) - eval_(b) - eval_(c) + eval_(d)) / (T(4) * h2 * h2);
                out.second.col(i * m_ + j) = mixed;
                out.second.col(j * m_ + i) = mixed;
            }
        }
        return out;
    }

private:
    Index m_;
    Index n_;
    EvalFn eval_;
    JetFn jet_;
    Box<T> box_;
    JetKind kind_;
};

template <typename T>
Box<T> make_box(const VectorX<T>& lo, const VectorX<T>& hi) {
    return Box<T>(lo, hi);
}

// Axis-aligned cube [-radius, radius]^m.
template <typename T>
Box<T> centered_box(Index m, T radius) {
    if (!(radius > T(0))) throw InvalidParams("box radius must be positive");
    VectorX<T> lo = VectorX<T>::Constant(m, -radius);
    VectorX<T> hi = VectorX<T>::Constant(m, radius);
    return Box<T>(lo, hi);
}

}  // namespace conebound
