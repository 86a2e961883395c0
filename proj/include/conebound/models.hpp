#pragma once

#include "conebound/charted_map.hpp"
#include "conebound/metric.hpp"
#include "conebound/sampling.hpp"
#include "conebound/types.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace conebound {

// ---------------------------------------------------------------------------
// Graph hypersurfaces phi(x) = (x, h(x)) with analytic jets.
// ---------------------------------------------------------------------------

template <typename T>
ChartedMap<T> make_graph_map(Index m, std::function<T(const VectorX<T>&)> h,
                             std::function<VectorX<T>(const VectorX<T>&)> grad_h,
                             std::function<MatrixX<T>(const VectorX<T>&)> hess_h,
                             Box<T> box) {
    auto eval = [m, h](const VectorX<T>& x) {
        VectorX<T> out(m + 1);
        out.head(m) = x;
        out(m) = h(x);
        return out;
    };
    auto jet = [m, h, grad_h, hess_h](const VectorX<T>& x) {
        Jet<T> out;
        out.value.resize(m + 1);
        out.value.head(m) = x;
        out.value(m) = h(x);
        out.first = MatrixX<T>::Zero(m + 1, m);
        out.first.template topLeftCorner(m, m).setIdentity();
        out.first.row(m) = grad_h(x).transpose();
        out.second = MatrixX<T>::Zero(m + 1, m * m);
        const MatrixX<T> hess = hess_h(x);
        for (Index i = 0; i < m; ++i)
            for (Index j = 0; j < m; ++j) out.second(m, i * m + j) = hess(i, j);
        return out;
    };
    return ChartedMap<T>(m, m + 1, eval, jet, std::move(box));
}

// Same graph but with jets synthesized by finite differences, for
// consistency checks against the analytic route.
template <typename T>
ChartedMap<T> make_graph_map_fd(Index m, std::function<T(const VectorX<T>&)> h, Box<T> box) {
    auto eval = [m, h](const VectorX<T>& x) {
        VectorX<T> out(m + 1);
        out.head(m) = x;
        out(m) = h(x);
        return out;
    };
    return ChartedMap<T>(m, m + 1, eval, std::move(box));
}

// ---------------------------------------------------------------------------
// Paraboloid family phi_d(x) = (x, |x|^2 + d), the sharpness example. The
// closed forms below are its ground truth.
// ---------------------------------------------------------------------------

template <typename T>
struct ParaboloidFamily {
    Index m;
    T d;
    ChartedMap<T> map;
};

template <typename T>
ParaboloidFamily<T> paraboloid_family(Index m, T d, T box_radius = T(10)) {
    if (m < 2) throw InvalidParams("paraboloid family requires m >= 2");
    if (!(d > T(0))) throw InvalidParams("paraboloid family requires d > 0");
    auto h = [d](const VectorX<T>& x) { return x.squaredNorm() + d; };
    auto grad = [](const VectorX<T>& x) { return VectorX<T>(T(2) * x); };
    auto hess = [m](const VectorX<T>&) { return MatrixX<T>(T(2) * MatrixX<T>::Identity(m, m)); };
    return {m, d, make_graph_map<T>(m, h, grad, hess, centered_box<T>(m, box_radius))};
}

template <typename T>
struct ParaboloidTruth {
    T tau_norm;
    T energy;
    T tangent_cone_cos2;   // independent of x
};

template <typename T>
ParaboloidTruth<T> paraboloid_truth(const ParaboloidFamily<T>& family, const VectorX<T>& x) {
    const T mm = static_cast<T>(family.m);
    const T r2 = x.squaredNorm();
    ParaboloidTruth<T> out;
    out.tau_norm = (T(2) * mm + T(8) * (mm - T(1)) * r2) / std::pow(T(1) + T(4) * r2, T(1.5));
    out.energy = mm;
    out.tangent_cone_cos2 = T(4) * family.d / (T(1) + T(4) * family.d);
    return out;
}

// ---------------------------------------------------------------------------
// Flat cone surface x3 = sqrt(x1^2 + x2^2), chart (r, theta) with the apex
// excluded (the induced metric 2dr^2 + r^2 dtheta^2 is singular at r = 0).
// ---------------------------------------------------------------------------

template <typename T>
ChartedMap<T> flat_cone_surface(T r_min = T(1e-3), T r_max = T(3)) {
    if (!(r_min > T(0)) || !(r_max > r_min)) throw InvalidParams("need 0 < r_min < r_max");
    auto eval = [](const VectorX<T>& x) {
        VectorX<T> out(3);
        out << x(0) * std::cos(x(1)), x(0) * std::sin(x(1)), x(0);
        return out;
    };
    auto jet = [eval](const VectorX<T>& x) {
        const T r = x(0), c = std::cos(x(1)), s = std::sin(x(1));
        Jet<T> out;
        out.value = eval(x);
        out.first.resize(3, 2);
        out.first.col(0) << c, s, T(1);
        out.first.col(1) << -r * s, r * c, T(0);
        out.second = MatrixX<T>::Zero(3, 4);
        out.second.col(1) << -s, c, T(0);    // d_r d_theta
        out.second.col(2) << -s, c, T(0);
        out.second.col(3) << -r * c, -r * s, T(0);  // d_theta d_theta
        return out;
    };
    VectorX<T> lo(2), hi(2);
    lo << r_min, T(0);
    hi << r_max, T(6.283185307179586477);
    return ChartedMap<T>(2, 3, eval, jet, Box<T>(lo, hi));
}

// Intrinsic flat-cone metric 2dr^2 + r^2 dtheta^2 as an explicit field.
template <typename T>
MetricField<T> flat_cone_metric_field() {
    MetricField<T> field;
    field.source = MetricSource::explicit_metric;
    field.value = [](const VectorX<T>& x) {
        MatrixX<T> g = MatrixX<T>::Zero(2, 2);
        g(0, 0) = T(2);
        g(1, 1) = x(0) * x(0);
        return g;
    };
    field.derivative = [](const VectorX<T>& x) {
        std::vector<MatrixX<T>> dg(2, MatrixX<T>::Zero(2, 2));
        dg[0](1, 1) = T(2) * x(0);
        return dg;
    };
    return field;
}

// Euclidean plane in polar coordinates, dr^2 + r^2 dtheta^2.
template <typename T>
MetricField<T> polar_metric_field() {
    MetricField<T> field;
    field.source = MetricSource::explicit_metric;
    field.value = [](const VectorX<T>& x) {
        MatrixX<T> g = MatrixX<T>::Zero(2, 2);
        g(0, 0) = T(1);
        g(1, 1) = x(0) * x(0);
        return g;
    };
    field.derivative = [](const VectorX<T>& x) {
        std::vector<MatrixX<T>> dg(2, MatrixX<T>::Zero(2, 2));
        dg[0](1, 1) = T(2) * x(0);
        return dg;
    };
    return field;
}

// ---------------------------------------------------------------------------
// Round sphere of radius R in R^3 on a polar-cap-excluding chart.
// ---------------------------------------------------------------------------

template <typename T>
ChartedMap<T> sphere_surface(T radius, VectorX<T> center, T cap_margin = T(0.3)) {
    if (!(radius > T(0))) throw InvalidParams("sphere radius must be positive");
    if (center.size() != 3) throw InvalidParams("sphere center must lie in R^3");
    auto eval = [radius, center](const VectorX<T>& x) {
        const T u = x(0), v = x(1);
        VectorX<T> out(3);
        out << std::sin(u) * std::cos(v), std::sin(u) * std::sin(v), std::cos(u);
        return VectorX<T>(center + radius * out);
    };
    auto jet = [radius, center](const VectorX<T>& x) {
        const T u = x(0), v = x(1);
        const T su = std::sin(u), cu = std::cos(u), sv = std::sin(v), cv = std::cos(v);
        Jet<T> out;
        out.value.resize(3);
        out.value << su * cv, su * sv, cu;
        out.value = center + radius * out.value;
        out.first.resize(3, 2);
        out.first.col(0) << cu * cv, cu * sv, -su;
        out.first.col(1) << -su * sv, su * cv, T(0);
        out.first *= radius;
        out.second.resize(3, 4);
        out.second.col(0) << -su * cv, -su * sv, -cu;
        out.second.col(1) << -cu * sv, cu * cv, T(0);
        out.second.col(2) = out.second.col(1);
        out.second.col(3) << -su * cv, -su * sv, T(0);
        out.second *= radius;
        return out;
    };
    VectorX<T> lo(2), hi(2);
    lo << cap_margin, T(0);
    hi << T(3.14159265358979323846) - cap_margin, T(6.283185307179586477);
    return ChartedMap<T>(2, 3, eval, jet, Box<T>(lo, hi));
}

// Saddle graph z = x^2 - y^2; asymptotic directions make II(W,W) vanish.
template <typename T>
ChartedMap<T> saddle_surface(T box_radius = T(1)) {
    auto h = [](const VectorX<T>& x) { return x(0) * x(0) - x(1) * x(1); };
    auto grad = [](const VectorX<T>& x) {
        VectorX<T> g(2);
        g << T(2) * x(0), T(-2) * x(1);
        return g;
    };
    auto hess = [](const VectorX<T>&) {
        MatrixX<T> hm = MatrixX<T>::Zero(2, 2);
        hm(0, 0) = T(2);
        hm(1, 1) = T(-2);
        return hm;
    };
    return make_graph_map<T>(2, h, grad, hess, centered_box<T>(2, box_radius));
}

// Affine plane z = height; harmonic and contained in a non-degenerate cone
// around e3 for any bounded chart box.
template <typename T>
ChartedMap<T> plane_surface(T height = T(1), T box_radius = T(1)) {
    auto h = [height](const VectorX<T>&) { return height; };
    auto grad = [](const VectorX<T>&) { return VectorX<T>(VectorX<T>::Zero(2)); };
    auto hess = [](const VectorX<T>&) { return MatrixX<T>(MatrixX<T>::Zero(2, 2)); };
    return make_graph_map<T>(2, h, grad, hess, centered_box<T>(2, box_radius));
}

// ---------------------------------------------------------------------------
// Rotationally symmetric models: metric dr^2 + sigma(r)^2 dS^2.
// Volumes reduce to one-dimensional integrals of sigma^{m-1}.
// ---------------------------------------------------------------------------

template <typename T>
struct RotationalModel {
    std::string name;
    Index m = 2;
    std::function<T(T)> sigma;
    std::function<T(T)> log_sigma;   // overflow-safe log(sigma); required at large r
    std::function<T(T)> dlog_sigma;  // sigma'/sigma; enables the Laplace tail at large r
    std::optional<T> beta;           // energy-decay exponent, when modelling one
    std::vector<T> breakpoints;      // radii where sigma is only C^1 (spline splices)
};

// Surface area of the unit (m-1)-sphere, 2 pi^{m/2} / Gamma(m/2).
template <typename T>
T unit_sphere_area(Index m) {
    const T half_m = static_cast<T>(m) / T(2);
    return T(2) * std::pow(T(3.14159265358979323846), half_m) / std::tgamma(half_m);
}

namespace detail {

// Composite Simpson, doubling the panel count until the relative change of
// successive estimates drops below rel_tol.
template <typename T, typename F>
T adaptive_simpson(F&& f, T a, T b, T rel_tol, int max_level, const char* what) {
    if (!(b > a)) return T(0);
    auto composite = [&](Index panels) {
        const T h = (b - a) / static_cast<T>(2 * panels);
        T acc = f(a) + f(b);
        for (Index i = 1; i < 2 * panels; ++i) {
            const T node = a + static_cast<T>(i) * h;
            const T w = (i % 2 == 1) ? T(4) : T(2);
            const T fv = f(node);
            if (!std::isfinite(fv)) throw EvaluationFailure("integrand is not finite");
            acc += w * fv;
        }
        return acc * h / T(3);
    };
    Index panels = 4;
    T prev = composite(panels);
    for (int level = 0; level < max_level; ++level) {
        panels *= 2;
        const T cur = composite(panels);
        const T scale = std::max({std::abs(cur), std::abs(prev), T(1e-300)});
        if (std::abs(cur - prev) <= rel_tol * scale) return cur;
        prev = cur;
    }
    throw QuadratureFailure(std::string("quadrature did not converge: ") + what);
}

}  // namespace detail

template <typename T>
struct VolumeTable {
    std::vector<T> radii;
    std::vector<T> boundary;   // Vol(dB_r) = omega_{m-1} sigma(r)^{m-1}
    std::vector<T> ball;       // Vol(B_r)
};

template <typename T>
T boundary_volume(const RotationalModel<T>& model, T r) {
    return unit_sphere_area<T>(model.m) * std::pow(model.sigma(r), static_cast<T>(model.m - 1));
}

template <typename T>
T ball_volume(const RotationalModel<T>& model, T r) {
    const T omega = unit_sphere_area<T>(model.m);
    const T power = static_cast<T>(model.m - 1);
    return detail::adaptive_simpson<T>(
        [&](T t) { return omega * std::pow(model.sigma(t), power); }, T(0), r, T(1e-8), 20,
        "ball volume");
}

template <typename T>
VolumeTable<T> volume_functions(const RotationalModel<T>& model, T r_max, T step) {
    if (!(step > T(0)) || !(r_max >= step)) throw InvalidParams("need 0 < step <= r_max");
    VolumeTable<T> table;
    for (T r = step; r <= r_max + step * T(0.5); r += step) {
        table.radii.push_back(r);
        table.boundary.push_back(boundary_volume(model, r));
        table.ball.push_back(ball_volume(model, r));
    }
    return table;
}

// Vol(B_r)/Vol(dB_r) evaluated in log space so that super-exponential sigma
// stays finite: ratio = int_0^r exp((m-1)(log sigma(t) - log sigma(r))) dt.
// The lower limit is cut where the integrand drops below e^{-50}; requires
// log_sigma non-decreasing (true for all presets).
template <typename T>
T volume_ratio(const RotationalModel<T>& model, T r) {
    const T power = static_cast<T>(model.m - 1);
    const T log_top = model.log_sigma(r);
    auto exponent = [&](T t) { return power * (model.log_sigma(t) - log_top); };

    // When sigma grows so fast that the integrand mass sits in a window
    // narrower than ~1e-8 r, direct nodes cannot resolve it in double
    // precision. Substitute u = power (log sigma(r) - log sigma(t)) and use
    // the Laplace expansion: ratio = (1/lp)(1 + lpp/lp^2) + O(lp^{-3} terms).
    if (model.dlog_sigma) {
        const T lp = power * model.dlog_sigma(r);
        if (lp > T(0) && T(50) / lp < T(1e-8) * std::max(r, T(1))) {
            const T h = T(1e-4) * std::max(r, T(1));
            const T lpp =
                power * (model.dlog_sigma(r + h) - model.dlog_sigma(r - h)) / (T(2) * h);
            return (T(1) / lp) * (T(1) + lpp / (lp * lp));
        }
    }

    T lo = T(0);
    if (exponent(std::numeric_limits<T>::min()) < T(-50)) {
        T a = T(0), b = r;
        for (int it = 0; it < 100; ++it) {
            const T mid = (a + b) / T(2);
            (exponent(mid) < T(-50) ? a : b) = mid;
        }
        lo = a;
    }
    auto integrand = [&](T t) { return std::exp(exponent(t)); };

    // integrate piecewise across splice radii; Simpson converges slowly
    // through points where sigma is only C^1
    std::vector<T> cuts{lo};
    for (const T bp : model.breakpoints)
        if (bp > lo && bp < r) cuts.push_back(bp);
    cuts.push_back(r);
    std::sort(cuts.begin(), cuts.end());
    T total = T(0);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
        total += detail::adaptive_simpson<T>(integrand, cuts[k], cuts[k + 1], T(1e-9), 24,
                                             "volume ratio");
    return total;
}

template <typename T>
RotationalModel<T> make_rotational_model(const std::string& preset, Index m = 2) {
    RotationalModel<T> model;
    model.m = m;
    model.name = preset;
    if (preset == "euclidean") {
        model.sigma = [](T r) { return r; };
        model.log_sigma = [](T r) { return std::log(r); };
        model.dlog_sigma = [](T r) { return T(1) / r; };
        model.beta = T(0);
        return model;
    }
    if (preset == "hyperbolic") {
        model.sigma = [](T r) { return std::sinh(r); };
        model.log_sigma = [](T r) {
            // log(sinh r) without overflow
            return r > T(20) ? r - std::log(T(2))
                             : std::log(std::sinh(std::max(r, std::numeric_limits<T>::min())));
        };
        model.dlog_sigma = [](T r) { return T(1) / std::tanh(r); };
        model.beta = T(0);
        return model;
    }
    if (preset == "exp-cubic") {
        // sigma = exp(r^3) for r >= 1, spliced on [0, 1] by the cubic
        // p(r) = r - 2 r^2 + (e+1) r^3 (p(0)=0, p'(0)=1, C^1 at r=1).
        const T e1 = std::exp(T(1)) + T(1);
        auto spline = [e1](T r) { return r - T(2) * r * r + e1 * r * r * r; };
        model.sigma = [spline](T r) {
            return r >= T(1) ? std::exp(r * r * r) : spline(r);
        };
        model.log_sigma = [spline](T r) {
            return r >= T(1) ? r * r * r
                             : std::log(std::max(spline(r), std::numeric_limits<T>::min()));
        };
        model.dlog_sigma = [spline, e1](T r) {
            if (r >= T(1)) return T(3) * r * r;
            const T dp = T(1) - T(4) * r + T(3) * e1 * r * r;
            return dp / std::max(spline(r), std::numeric_limits<T>::min());
        };
        model.breakpoints = {T(1)};
        return model;
    }
    throw UnknownFamily("unknown rotational model preset: " + preset);
}

// ---------------------------------------------------------------------------
// Heuristic integrability-at-infinity classifier over doubling radii.
// ---------------------------------------------------------------------------

enum class IntegrabilityClass { divergent, integrable, inconclusive };

inline const char* to_string(IntegrabilityClass c) {
    switch (c) {
        case IntegrabilityClass::divergent: return "divergent";
        case IntegrabilityClass::integrable: return "integrable";
        default: return "inconclusive";
    }
}

template <typename T>
struct IntegrabilityResult {
    IntegrabilityClass classification = IntegrabilityClass::inconclusive;
    std::vector<T> radii;        // doubling endpoints r_start * 2^k
    std::vector<T> increments;   // I(2R) - I(R)
    T median_increment = T(0);
};

// Partial integrals at doubling radii, log-substituted quadrature per
// segment. Divergence/integrability thresholds are documented heuristics;
// anything in between stays inconclusive.
template <typename T>
IntegrabilityResult<T> integrability_test(const std::function<T(T)>& integrand, T r_start,
                                          T r_max = T(1e6)) {
    if (!(r_start > T(0)) || !(r_max > r_start)) throw InvalidParams("need 0 < r_start < r_max");
    IntegrabilityResult<T> out;
    for (T r = r_start; r * T(2) <= r_max * (T(1) + T(1e-12)); r *= T(2)) {
        // substitute s = log t: int_R^{2R} f = int f(e^s) e^s ds
        const T inc = detail::adaptive_simpson<T>(
            [&](T s) {
                const T t = std::exp(s);
                return integrand(t) * t;
            },
            std::log(r), std::log(T(2) * r), T(1e-7), 18, "integrability increment");
        out.radii.push_back(T(2) * r);
        out.increments.push_back(inc);
    }
    const std::size_t n = out.increments.size();
    if (n < 6) return out;

    std::vector<T> sorted = out.increments;
    std::sort(sorted.begin(), sorted.end());
    out.median_increment = (n % 2 == 1) ? sorted[n / 2]
                                        : (sorted[n / 2 - 1] + sorted[n / 2]) / T(2);

    bool divergent = out.median_increment > T(0);
    for (std::size_t k = n - 5; k < n; ++k)
        divergent = divergent && out.increments[k] >= T(0.5) * out.median_increment;
    if (divergent) {
        out.classification = IntegrabilityClass::divergent;
        return out;
    }

    bool integrable = true;
    for (std::size_t k = n - 5; k < n; ++k) {
        const T prev = out.increments[k - 1];
        const T cur = out.increments[k];
        if (prev <= T(0))
            integrable = integrable && cur <= T(0) + T(1e-300);
        else
            integrable = integrable && (cur / prev) <= T(0.7);
    }
    if (integrable) out.classification = IntegrabilityClass::integrable;
    return out;
}

// ---------------------------------------------------------------------------
// Pointwise energy-decay check |dphi(x)|^2 >= C / (1 + r(x))^beta.
// ---------------------------------------------------------------------------

template <typename T>
struct EnergyDecayResult {
    bool ok = true;
    Index worst_index = -1;
    T worst_margin = std::numeric_limits<T>::infinity();  // min |dphi|^2 - C/(1+r)^beta
    std::string note;
};

template <typename T>
EnergyDecayResult<T> casoB_check(const std::function<T(const VectorX<T>&)>& energy,
                                 const std::function<T(const VectorX<T>&)>& radius, T c, T beta,
                                 const MatrixX<T>& samples) {
    if (samples.cols() == 0) throw EmptyInput("no samples supplied");
    EnergyDecayResult<T> out;
    for (Index k = 0; k < samples.cols(); ++k) {
        const VectorX<T> x = samples.col(k);
        const T bound = c / std::pow(T(1) + radius(x), beta);
        const T margin = energy(x) - bound;
        if (margin < out.worst_margin) {
            out.worst_margin = margin;
            out.worst_index = k;
        }
    }
    out.ok = out.worst_margin >= -T(1e-9);
    if (beta == T(2))
        out.note = "beta = 2 boundary: volume growth must be tested with the "
                   "log-refined integrand log(r) / (r log Vol(B_r))";
    return out;
}

template <typename T>
EnergyDecayResult<T> casoB_check(const ChartedMap<T>& map, T c, T beta,
                                 const MatrixX<T>& samples) {
    auto energy = [&map](const VectorX<T>& x) {
        return energy_density(map, pullback_metric(map, x), x);
    };
    auto radius = [](const VectorX<T>& x) { return x.norm(); };
    return casoB_check<T>(energy, radius, c, beta, samples);
}

// ---------------------------------------------------------------------------
// Family registry.
// ---------------------------------------------------------------------------

template <typename T>
struct FamilyParams {
    Index m = 2;
    T d = T(0.25);          // paraboloid offset
    T radius = T(1);        // sphere radius
    T box_radius = T(10);   // chart box half-width for graph families
    T r_min = T(1e-3);      // flat-cone apex exclusion
    T r_max = T(3);
};

inline bool is_rotational_id(const std::string& id) { return id.rfind("rotational:", 0) == 0; }

template <typename T>
ChartedMap<T> make_family_map(const std::string& id, const FamilyParams<T>& p) {
    if (id == "paraboloid") return paraboloid_family<T>(p.m, p.d, p.box_radius).map;
    if (id == "flat-cone") return flat_cone_surface<T>(p.r_min, p.r_max);
    if (id == "sphere") {
        VectorX<T> center(3);
        center << T(0), T(0), T(3) * p.radius;
        return sphere_surface<T>(p.radius, center);
    }
    if (id == "plane") return plane_surface<T>(T(1), std::min(p.box_radius, T(1)));
    throw UnknownFamily("unknown family id: " + id);
}

template <typename T>
RotationalModel<T> make_family_model(const std::string& id, Index m) {
    if (!is_rotational_id(id)) throw UnknownFamily("not a rotational model id: " + id);
    return make_rotational_model<T>(id.substr(std::string("rotational:").size()), m);
}

// Sampling strategy appropriate for each built-in family's chart geometry.
inline SampleMode default_sample_mode(const std::string& id) {
    if (id == "paraboloid") return SampleMode::radial_log;
    if (id == "flat-cone" || id == "sphere") return SampleMode::grid;
    return SampleMode::random;
}

}  // namespace conebound
