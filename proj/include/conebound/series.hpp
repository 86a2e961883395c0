#pragma once

#include "conebound/bounds.hpp"
#include "conebound/cone.hpp"
#include "conebound/models.hpp"
#include "conebound/types.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace conebound {

struct Series {
    std::string name;
    std::string x_label;
    std::string y_label;
    std::vector<double> x;
    std::vector<double> y;
};

// cos^2(theta_d)/d against d for the paraboloid family, theta_d fitted from
// samples. The ratio tends to 4 as d -> 0.
inline Series sharpness_series(Index count, double d_min, double d_max, Index samples_per_fit,
                               std::uint64_t seed) {
    if (count < 2 || !(d_min > 0) || !(d_max > d_min))
        throw InvalidParams("need count >= 2 and 0 < d_min < d_max");
    Series series{"sharpness", "d", "cos2_theta_over_d", {}, {}};
    const double log_lo = std::log(d_min);
    const double log_hi = std::log(d_max);
    for (Index k = 0; k < count; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(count - 1);
        const double d = std::exp(log_lo + t * (log_hi - log_lo));
        const ParaboloidFamily<double> family = paraboloid_family<double>(2, d, 10.0);
        SampleSpec spec{SampleMode::radial_log, samples_per_fit, seed, 1e-3};
        const MatrixX<double> chart = make_chart_samples(family.map, spec);
        const MatrixX<double> points = map_samples(family.map, chart);
        const Cone<double> cone =
            min_enclosing_cone(points, VectorX<double>::Zero(3).eval(), seed);
        const double c = std::cos(cone.width);
        series.x.push_back(d);
        series.y.push_back(c * c / d);
    }
    return series;
}

// A_eta against eta on a log-spaced grid; non-decreasing in eta.
inline Series aeta_series(Index count, double eta_min, double eta_max, std::uint64_t seed) {
    if (count < 2 || !(eta_min > 0) || !(eta_max > eta_min))
        throw InvalidParams("need count >= 2 and 0 < eta_min < eta_max");
    Series series{"a-eta", "eta", "A_eta", {}, {}};
    const double log_lo = std::log(eta_min);
    const double log_hi = std::log(eta_max);
    for (Index k = 0; k < count; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(count - 1);
        const double eta = std::exp(log_lo + t * (log_hi - log_lo));
        series.x.push_back(eta);
        series.y.push_back(compute_A(eta, seed).value);
    }
    return series;
}

}  // namespace conebound
