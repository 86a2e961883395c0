#pragma once

#include "conebound/charted_map.hpp"
#include "conebound/types.hpp"

#include <cmath>
#include <vector>

namespace conebound {

// Chart points are stored column-wise throughout.

template <typename T>
MatrixX<T> grid_samples(const Box<T>& box, Index per_axis) {
    const Index m = box.min().size();
    Index total = 1;
    for (Index i = 0; i < m; ++i) total *= per_axis;
    MatrixX<T> out(m, total);
    for (Index k = 0; k < total; ++k) {
        Index rem = k;
        for (Index i = 0; i < m; ++i) {
            const Index idx = rem % per_axis;
            rem /= per_axis;
            const T t = per_axis == 1 ? T(0.5)
                                      : static_cast<T>(idx) / static_cast<T>(per_axis - 1);
            out(i, k) = box.min()(i) + t * (box.max()(i) - box.min()(i));
        }
    }
    return out;
}

template <typename T>
MatrixX<T> random_samples(const Box<T>& box, Index count, std::uint64_t seed) {
    const Index m = box.min().size();
    MatrixX<T> out(m, count);
    Rng rng(seed);
    for (Index k = 0; k < count; ++k)
        for (Index i = 0; i < m; ++i)
            out(i, k) = static_cast<T>(rng.uniform(static_cast<double>(box.min()(i)),
                                                   static_cast<double>(box.max()(i))));
    return out;
}

// Log-spaced radii crossed with directions on S^{m-1}: uniform angles for
// m = 2, seeded isotropic directions otherwise. Resolves behavior near the
// chart origin far better than a uniform grid.
template <typename T>
MatrixX<T> radial_log_samples(Index m, T r_lo, T r_hi, Index n_r, Index n_dir,
                              std::uint64_t seed) {
    if (!(r_lo > T(0)) || !(r_hi > r_lo)) throw InvalidParams("need 0 < r_lo < r_hi");
    MatrixX<T> dirs(m, n_dir);
    if (m == 2) {
        for (Index k = 0; k < n_dir; ++k) {
            const T phi = T(2) * T(3.14159265358979323846) * static_cast<T>(k) /
                          static_cast<T>(n_dir);
            dirs(0, k) = std::cos(phi);
            dirs(1, k) = std::sin(phi);
        }
    } else {
        Rng rng(seed);
        for (Index k = 0; k < n_dir; ++k) {
            VectorX<T> d(m);
            do {
                for (Index i = 0; i < m; ++i) d(i) = static_cast<T>(rng.normal());
            } while (d.norm() < T(1e-8));
            dirs.col(k) = d / d.norm();
        }
    }

    MatrixX<T> out(m, n_r * n_dir);
    const T log_lo = std::log(r_lo);
    const T log_hi = std::log(r_hi);
    for (Index ir = 0; ir < n_r; ++ir) {
        const T t = n_r == 1 ? T(1) : static_cast<T>(ir) / static_cast<T>(n_r - 1);
        const T r = std::exp(log_lo + t * (log_hi - log_lo));
        for (Index k = 0; k < n_dir; ++k) out.col(ir * n_dir + k) = r * dirs.col(k);
    }
    return out;
}

// Images of chart samples under the map, evaluated in parallel.
template <typename T>
MatrixX<T> map_samples(const ChartedMap<T>& map, const MatrixX<T>& chart_points) {
    MatrixX<T> out(map.dim_ambient(), chart_points.cols());
    parallel_for(chart_points.cols(),
                 [&](Index k) { out.col(k) = map.evaluate(chart_points.col(k)); });
    return out;
}

enum class SampleMode { radial_log, grid, random };

struct SampleSpec {
    SampleMode mode = SampleMode::random;
    Index count = 1000;
    std::uint64_t seed = 0;
    double r_lo = 1e-3;   // inner radius for radial_log sampling
};

// Chart samples for a map's domain box under the requested strategy.
// radial_log uses the box center-to-face distance as the outer radius.
template <typename T>
MatrixX<T> make_chart_samples(const ChartedMap<T>& map, const SampleSpec& spec) {
    if (spec.count < 1) throw InvalidParams("sample count must be >= 1");
    const Box<T>& box = map.domain_box();
    switch (spec.mode) {
        case SampleMode::grid: {
            const Index m = map.dim_domain();
            Index per_axis = 1;
            while (std::pow(static_cast<double>(per_axis + 1), static_cast<double>(m)) <=
                   static_cast<double>(spec.count))
                ++per_axis;
            return grid_samples(box, std::max<Index>(per_axis, 2));
        }
        case SampleMode::radial_log: {
            const T r_hi = (box.max() - box.min()).minCoeff() / T(2);
            const Index n_r = static_cast<Index>(std::ceil(std::sqrt(static_cast<double>(spec.count))));
            const Index n_dir = (spec.count + n_r - 1) / n_r;
            return radial_log_samples<T>(map.dim_domain(), static_cast<T>(spec.r_lo), r_hi, n_r,
                                         n_dir, spec.seed);
        }
        case SampleMode::random:
        default:
            return random_samples(box, spec.count, spec.seed);
    }
}

}  // namespace conebound
