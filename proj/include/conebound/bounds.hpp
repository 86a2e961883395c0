#pragma once

#include "conebound/charted_map.hpp"
#include "conebound/cone.hpp"
#include "conebound/geometry.hpp"
#include "conebound/metric.hpp"
#include "conebound/sampling.hpp"
#include "conebound/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace conebound {

// ---------------------------------------------------------------------------
// A_eta = sup { xi a^2 sqrt(1 - a^2) : 0 < xi < 1, 0 < a < min(1, eta sqrt(1-xi)) }
// ---------------------------------------------------------------------------

template <typename T>
struct AetaResult {
    T eta;
    T value;        // within 1e-6 of the supremum
    T xi;           // argmax
    T alpha;        // argmax
    T resolution;   // final grid cell size
};

// Nested grid search. The feasible set is open; we scan its 1e-9-shrunken
// closure in coordinates (alpha, t), where t parametrizes xi linearly up to
// its constraint ceiling 1 - alpha^2/eta^2. The active boundary t = 1 then
// lies exactly on the grid and the objective stays well-conditioned in
// alpha for every eta; the supremum equals the closure maximum by
// continuity. `seed` jitters refinement windows by a sub-cell amount; it
// cannot move the value by more than ~1e-10.
template <typename T>
AetaResult<T> compute_A(T eta, std::uint64_t seed = 0) {
    if (!(eta > T(0))) throw InvalidParams("eta must be positive");
    const T eps = T(1e-9);
    const Index n = 200;

    auto xi_of = [eta, eps](T alpha, T t) {
        const T ceiling = T(1) - (alpha * alpha) / (eta * eta) - eps;
        return eps + t * std::max(ceiling - eps, T(0));
    };
    auto value_at = [&](T alpha, T t) {
        const T a2 = alpha * alpha;
        return xi_of(alpha, t) * a2 * std::sqrt(std::max(T(0), T(1) - a2));
    };

    Rng rng(seed);
    const T a_sup = std::min(T(1), eta);
    T a_lo = eps * a_sup, a_hi = (T(1) - eps) * a_sup;
    T t_lo = T(0), t_hi = T(1);
    T best = T(-1), best_a = a_lo, best_t = T(1);
    T cell = (a_hi - a_lo) / static_cast<T>(n - 1);

    for (int pass = 0; pass <= 3; ++pass) {
        if (pass > 0) {
            const T span_a = a_sup / std::pow(T(10), T(pass));
            const T span_t = T(1) / std::pow(T(10), T(pass));
            const T jitter = (static_cast<T>(rng.uniform()) - T(0.5)) * cell * T(0.2);
            a_lo = std::clamp(best_a + jitter - span_a / T(2), eps * a_sup,
                              (T(1) - eps) * a_sup - span_a);
            a_hi = a_lo + span_a;
            t_lo = std::clamp(best_t - span_t / T(2), T(0), T(1) - span_t);
            t_hi = t_lo + span_t;
        }
        const T da = (a_hi - a_lo) / static_cast<T>(n - 1);
        const T dt = (t_hi - t_lo) / static_cast<T>(n - 1);
        for (Index i = 0; i < n; ++i) {
            const T alpha = a_lo + static_cast<T>(i) * da;
            for (Index j = 0; j < n; ++j) {
                const T t = t_lo + static_cast<T>(j) * dt;
                const T v = value_at(alpha, t);
                if (v > best) {
                    best = v;
                    best_a = alpha;
                    best_t = t;
                }
            }
        }
        cell = da;
    }

    AetaResult<T> out;
    out.eta = eta;
    out.alpha = best_a;
    out.xi = xi_of(best_a, best_t);
    out.value = out.xi * out.alpha * out.alpha *
                std::sqrt(std::max(T(0), T(1) - out.alpha * out.alpha));
    out.resolution = cell;
    return out;
}

// ---------------------------------------------------------------------------
// Width bounds on cos(theta). Reports clamp them to [0, 1]; a raw value
// above 1 means the inequality puts no restriction on the cone.
// ---------------------------------------------------------------------------

template <typename T>
T theorem1_bound(T d, T sup_ratio, T a_value) {
    if (!(std::isfinite(d) && std::isfinite(sup_ratio)) || d < T(0) || sup_ratio < T(0))
        throw InvalidParams("bound inputs must be finite and non-negative");
    if (!(a_value > T(0))) throw InvalidParams("A must be positive");
    return std::sqrt(d * sup_ratio / a_value);
}

template <typename T>
T theorem2_bound(T d, T chi, T a1_value) {
    if (!(std::isfinite(d) && std::isfinite(chi)) || d < T(0) || chi < T(0))
        throw InvalidParams("bound inputs must be finite and non-negative");
    if (!(a1_value > T(0))) throw InvalidParams("A_1 must be positive");
    return std::sqrt(d * chi / a1_value);
}

// ---------------------------------------------------------------------------
// Proof-region parameters (T, b, xi, alpha, a = b alpha) with the admissible
// ranges baked into the constructor.
// ---------------------------------------------------------------------------

template <typename T>
class AuxParams {
public:
    AuxParams(T t_ref, T b, T xi, T alpha)
        : t_ref_(t_ref), b_(b), xi_(xi), alpha_(alpha), a_(b * alpha) {
        if (!(t_ref > T(0))) throw InvalidParams("T must be positive");
        if (!(b > T(0)) || !(b < T(1))) throw InvalidParams("b must lie in (0,1)");
        if (!(xi > T(0)) || !(xi < T(1))) throw InvalidParams("xi must lie in (0,1)");
        if (!(alpha > T(0)) || !(alpha < std::sqrt(T(1) - xi)))
            throw InvalidParams("alpha must lie in (0, sqrt(1 - xi))");
    }

    T t_ref() const { return t_ref_; }
    T b() const { return b_; }
    T xi() const { return xi_; }
    T alpha() const { return alpha_; }
    T a() const { return a_; }

    T phi_max() const { return t_ref_ / std::sqrt(b_ * b_ - a_ * a_); }

    // per-point tension budget: T |tau| < richiestachi_rhs() |dphi|^2
    T richiestachi_rhs() const {
        return xi_ * a_ * a_ * std::sqrt(b_ * b_ - a_ * a_) / b_;
    }

    // the explicit positive floor for Lu on the superlevel region
    T delta_floor() const {
        return (a_ * a_ * std::sqrt(b_ * b_ - a_ * a_) / (b_ * t_ref_)) *
               (T(1) - xi_ - (a_ * a_) / (b_ * b_));
    }

private:
    T t_ref_, b_, xi_, alpha_, a_;
};

// ---------------------------------------------------------------------------
// Pointwise quantities of the auxiliary function
// u = sqrt(T^2 + a^2 |phi - o|^2) - <phi - o, v>.
// ---------------------------------------------------------------------------

template <typename T>
struct AuxQuantities {
    T u = T(0);
    T s = T(0);                  // a^2 |phi| / sqrt(T^2 + a^2 |phi|^2), in [0, a^2/b)
    T phi_max = T(0);
    T delta_u_analytic = T(0);
    T delta_u_numeric = T(0);
    T lu = T(0);                 // delta_u_analytic / |dphi|^2
    T energy = T(0);
    T phi_norm = T(0);
    T tau_norm = T(0);
    T cone_margin = T(0);        // <phi - o, v> - b |phi - o|
};

template <typename T>
AuxQuantities<T> aux_quantities(const ChartedMap<T>& map, const MetricField<T>& field,
                                const VectorX<T>& x, const AuxParams<T>& params,
                                const VectorX<T>& o, const VectorX<T>& v,
                                bool with_numeric_laplacian = true) {
    const VectorX<T> w = map.evaluate(x) - o;
    const T r = w.norm();
    if (r < T(1e-14) * (T(1) + o.norm()))
        throw ApexSample("sample point coincides with the cone vertex");

    const T t2 = params.t_ref() * params.t_ref();
    const T a2 = params.a() * params.a();
    const T root = std::sqrt(t2 + a2 * r * r);

    AuxQuantities<T> out;
    out.phi_norm = r;
    out.u = root - w.dot(v);
    out.s = a2 * r / root;
    out.phi_max = params.phi_max();
    out.cone_margin = w.dot(v) - params.b() * r;

    const MetricSample<T> metric = field.sample(x);
    const TensionVector<T> tension = tension_field(map, metric, x);
    out.energy = tension.energy_density;
    out.tau_norm = tension.tau.norm();

    const Jet<T> jet = map.jet(x);
    const VectorX<T> q = jet.first.transpose() * w;   // q_i = <phi - o, d_i phi>
    const T quad = q.dot(metric.g_inv * q);

    out.delta_u_analytic = ((out.s / r) * w - v).dot(tension.tau) + out.s * out.energy / r -
                           (out.s * out.s / (r * r * root)) * quad;
    out.lu = out.delta_u_analytic / out.energy;

    if (with_numeric_laplacian) {
        auto u_field = [&map, &o, &v, t2, a2](const VectorX<T>& y) {
            const VectorX<T> wy = map.evaluate(y) - o;
            return std::sqrt(t2 + a2 * wy.squaredNorm()) - wy.dot(v);
        };
        out.delta_u_numeric = laplace_beltrami<T>(u_field, field, x);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Superlevel region Omega_o = { u >= u(x_o) } over a sample set, with the
// mid-proof bounds checked on it. Ambient points are column-wise.
// ---------------------------------------------------------------------------

template <typename T>
struct OmegaRegion {
    std::vector<Index> indices;               // samples with u >= u(x_o)
    T u_base = T(0);
    bool base_positive = false;               // u(x_o) > 0
    Index cone_hypothesis_count = 0;          // region samples with <w,v> >= b|w|
    std::vector<Index> limitato_violations;   // u >= T where the cone hypothesis holds
    std::vector<Index> upperbound_violations; // |phi| > phi_max (1 + 1e-9), same restriction
};

template <typename T>
T aux_u_of_point(const VectorX<T>& z, const VectorX<T>& o, const VectorX<T>& v,
                 const AuxParams<T>& params) {
    const VectorX<T> w = z - o;
    return std::sqrt(params.t_ref() * params.t_ref() + params.a() * params.a() * w.squaredNorm()) -
           w.dot(v);
}

template <typename T>
OmegaRegion<T> omega_region(const MatrixX<T>& points, const VectorX<T>& o, const VectorX<T>& v,
                            const AuxParams<T>& params, Index base_index) {
    if (points.cols() == 0) throw EmptyInput("no samples supplied");
    if (base_index < 0 || base_index >= points.cols())
        throw InvalidParams("base sample index out of range");

    OmegaRegion<T> out;
    out.u_base = aux_u_of_point<T>(points.col(base_index), o, v, params);
    out.base_positive = out.u_base > T(0);
    const T phi_cap = params.phi_max() * (T(1) + T(1e-9));

    for (Index k = 0; k < points.cols(); ++k) {
        const VectorX<T> w = points.col(k) - o;
        const T u = aux_u_of_point<T>(points.col(k), o, v, params);
        if (u < out.u_base) continue;
        out.indices.push_back(k);
        const bool in_cone = w.dot(v) >= params.b() * w.norm() - T(1e-12) * (T(1) + w.norm());
        if (!in_cone) continue;
        ++out.cone_hypothesis_count;
        if (u >= params.t_ref() + T(1e-9) * std::max(T(1), params.t_ref()))
            out.limitato_violations.push_back(k);
        if (w.norm() > phi_cap) out.upperbound_violations.push_back(k);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Lu floor on the superlevel region. Samples breaking the per-point tension
// budget are reported, not fatal: they mirror the contradiction structure.
// ---------------------------------------------------------------------------

template <typename T>
struct FinaleResult {
    T min_lu = std::numeric_limits<T>::infinity();
    T delta_floor = T(0);
    bool positive = false;                      // min_lu >= delta_floor - 1e-9
    std::vector<Index> richiestachi_violations; // T |tau| >= rhs |dphi|^2
    Index checked_count = 0;
};

template <typename T>
FinaleResult<T> finale_check(const ChartedMap<T>& map, const MetricField<T>& field,
                             const MatrixX<T>& chart_samples, const std::vector<Index>& region,
                             const AuxParams<T>& params, const VectorX<T>& o,
                             const VectorX<T>& v) {
    FinaleResult<T> out;
    out.delta_floor = params.delta_floor();
    const T rhs = params.richiestachi_rhs();
    for (const Index k : region) {
        const VectorX<T> xk = chart_samples.col(k);
        const AuxQuantities<T> aux = aux_quantities(map, field, xk, params, o, v, false);
        if (!(params.t_ref() * aux.tau_norm < rhs * aux.energy)) {
            out.richiestachi_violations.push_back(k);
            continue;
        }
        ++out.checked_count;
        out.min_lu = std::min(out.min_lu, aux.lu);
    }
    out.positive = out.checked_count > 0 && out.min_lu >= out.delta_floor - T(1e-9);
    return out;
}

// ---------------------------------------------------------------------------
// Second derivative of u along the geodesic with initial direction W (g-unit)
// for an isometric immersion:
//   <(S/|phi|) phi - v, II(W,W)> + S/|phi| - S^3/(a^2 |phi|^3) <dphi(W), phi>^2.
// Cross-checkable against the coordinate-Hessian route.
// ---------------------------------------------------------------------------

template <typename T>
T hess_u_direction(const ChartedMap<T>& map, const VectorX<T>& x, const VectorX<T>& w_dir,
                   const AuxParams<T>& params, const VectorX<T>& o, const VectorX<T>& v) {
    const MetricSample<T> metric = pullback_metric(map, x);
    const T norm_g = std::sqrt(w_dir.dot(metric.g * w_dir));
    if (std::abs(norm_g - T(1)) > T(1e-8))
        throw DegeneratePlane("direction must be unit length in the induced metric");

    const VectorX<T> w = map.evaluate(x) - o;
    const T r = w.norm();
    if (r < T(1e-14) * (T(1) + o.norm()))
        throw ApexSample("sample point coincides with the cone vertex");

    const T t2 = params.t_ref() * params.t_ref();
    const T a2 = params.a() * params.a();
    const T s = a2 * r / std::sqrt(t2 + a2 * r * r);

    const SecondFundamentalForm<T> ii = second_fundamental_form(map, x);
    const VectorX<T> ii_ww = ii.contract(w_dir);
    const Jet<T> jet = map.jet(x);
    const T dphi_w_phi = (jet.first * w_dir).dot(w);

    return ((s / r) * w - v).dot(ii_ww) + s / r -
           (s * s * s / (a2 * r * r * r)) * dphi_w_phi * dphi_w_phi;
}

// ---------------------------------------------------------------------------
// Minimizer of |II(W,W)| over g-unit directions. When 0 < n - m < m and the
// sectional curvatures at the point stay below chi^2, the minimum cannot
// exceed chi.
// ---------------------------------------------------------------------------

template <typename T>
struct OtsukiResult {
    VectorX<T> direction;   // chart coordinates, g-unit
    T value;                // |II(W,W)| at the minimizer
};

template <typename T>
OtsukiResult<T> otsuki_direction(const SecondFundamentalForm<T>& ii, const MetricSample<T>& metric,
                                 T chi, std::uint64_t seed = 0, Index grid_count = 1024) {
    const Index m = ii.dim_domain();
    const Index n = ii.values.rows();
    const Index codim = n - m;
    if (!(codim > 0 && codim < m))
        throw CodimensionOutOfRange("requires 0 < n - m < m");
    if (!(chi >= T(0))) throw InvalidParams("chi must be non-negative");

    // g-orthonormal basis: columns of L^{-T}
    Eigen::LLT<MatrixX<T>> llt(metric.g);
    if (llt.info() != Eigen::Success) throw SingularMetric("metric not positive-definite");
    const MatrixX<T> basis =
        llt.matrixL().transpose().solve(MatrixX<T>::Identity(m, m));

    // II in the orthonormal basis: B(a,b) = II(E_a, E_b)
    std::vector<VectorX<T>> b(static_cast<std::size_t>(m * m));
    for (Index p = 0; p < m; ++p)
        for (Index q = 0; q < m; ++q)
            b[static_cast<std::size_t>(p * m + q)] = ii.contract(basis.col(p), basis.col(q));
    auto b_at = [&](Index p, Index q) -> const VectorX<T>& {
        return b[static_cast<std::size_t>(p * m + q)];
    };

    // precondition: sampled plane set obeys Sect <= chi^2
    {
        Rng rng(seed ^ 0x5bd1e995ULL);
        auto sect = [&](const VectorX<T>& ex, const VectorX<T>& ey) {
            VectorX<T> xx = VectorX<T>::Zero(n), yy = VectorX<T>::Zero(n), xy = VectorX<T>::Zero(n);
            for (Index p = 0; p < m; ++p)
                for (Index q = 0; q < m; ++q) {
                    xx += ex(p) * ex(q) * b_at(p, q);
                    yy += ey(p) * ey(q) * b_at(p, q);
                    xy += ex(p) * ey(q) * b_at(p, q);
                }
            return xx.dot(yy) - xy.squaredNorm();
        };
        auto check_plane = [&](const VectorX<T>& ex, const VectorX<T>& ey) {
            if (sect(ex, ey) > chi * chi + T(1e-9))
                throw PreconditionUnverified("a sampled plane exceeds the curvature bound chi^2");
        };
        for (Index p = 0; p < m; ++p)
            for (Index q = p + 1; q < m; ++q)
                check_plane(VectorX<T>::Unit(m, p), VectorX<T>::Unit(m, q));
        for (int trial = 0; trial < 64 && m > 1; ++trial) {
            VectorX<T> ex(m), ey(m);
            for (Index i = 0; i < m; ++i) {
                ex(i) = static_cast<T>(rng.normal());
                ey(i) = static_cast<T>(rng.normal());
            }
            ex.normalize();
            ey -= ey.dot(ex) * ex;
            if (ey.norm() < T(1e-6)) continue;
            ey.normalize();
            check_plane(ex, ey);
        }
    }

    auto quadratic = [&](const VectorX<T>& wh) {
        VectorX<T> out = VectorX<T>::Zero(n);
        for (Index p = 0; p < m; ++p)
            for (Index q = 0; q < m; ++q) out += wh(p) * wh(q) * b_at(p, q);
        return out;
    };
    auto objective = [&](const VectorX<T>& wh) { return quadratic(wh).squaredNorm(); };

    // coarse sphere scan
    Rng rng(seed);
    VectorX<T> best = VectorX<T>::Unit(m, 0);
    T best_val = objective(best);
    for (Index k = 0; k < grid_count; ++k) {
        VectorX<T> wh(m);
        if (m == 2) {
            const T t = T(3.14159265358979323846) * static_cast<T>(k) / static_cast<T>(grid_count);
            wh << std::cos(t), std::sin(t);
        } else {
            for (Index i = 0; i < m; ++i) wh(i) = static_cast<T>(rng.normal());
            if (wh.norm() < T(1e-8)) continue;
            wh.normalize();
        }
        const T val = objective(wh);
        if (val < best_val) {
            best_val = val;
            best = wh;
        }
    }

    // projected-gradient polish on the unit sphere
    T step = T(0.1);
    for (int it = 0; it < 50; ++it) {
        const VectorX<T> v_ii = quadratic(best);
        VectorX<T> grad = VectorX<T>::Zero(m);
        for (Index c = 0; c < m; ++c) {
            T acc = T(0);
            for (Index p = 0; p < m; ++p) acc += best(p) * b_at(p, c).dot(v_ii);
            grad(c) = T(4) * acc;
        }
        grad -= grad.dot(best) * best;
        if (grad.norm() < T(1e-16)) break;
        VectorX<T> cand = (best - step * grad).normalized();
        if (objective(cand) < best_val) {
            best = cand;
            best_val = objective(cand);
            step *= T(1.5);
        } else {
            step *= T(0.5);
        }
    }

    OtsukiResult<T> out;
    out.direction = basis * best;   // g-unit by construction
    out.value = std::sqrt(best_val);
    if (out.value > chi + T(1e-6))
        throw PreconditionUnverified(
            "direction search could not certify |II(W,W)| <= chi; value " +
            std::to_string(static_cast<double>(out.value)));
    return out;
}

// ---------------------------------------------------------------------------
// Certified sampled verification of the width bounds.
// ---------------------------------------------------------------------------

template <typename T>
struct VerificationReport {
    std::string family = "points";
    std::vector<std::pair<std::string, T>> parameters;
    Index sample_count = 0;
    T sup_ratio = T(0);
    T d = T(0);
    std::optional<Cone<T>> cone;
    T a_eta = T(0);     // the eta the constant was computed at
    T a_value = T(0);
    T rhs_bound = T(0);  // clamped to [0, 1] for reporting
    T rhs_raw = T(0);    // sqrt(d sup / A) before clamping
    T lhs = T(0);
    bool satisfied = false;
    T margin = T(0);
    bool unconstrained = false;
    std::vector<std::string> failures;
};

template <typename T>
VerificationReport<T> certify_theorem1(const ChartedMap<T>& map, const VectorX<T>& o,
                                       const SampleSpec& spec, bool isometric,
                                       const std::optional<VectorX<T>>& axis_hint = std::nullopt,
                                       const MetricField<T>* explicit_metric = nullptr) {
    const MatrixX<T> chart = make_chart_samples(map, spec);
    const MatrixX<T> points = map_samples(map, chart);
    const Index count = chart.cols();

    const MetricField<T> induced =
        explicit_metric ? MetricField<T>{} : induced_metric_field(map);
    const MetricField<T>& field = explicit_metric ? *explicit_metric : induced;

    std::vector<T> ratios(static_cast<std::size_t>(count), T(0));
    std::vector<std::string> errors(static_cast<std::size_t>(count));
    parallel_for(count, [&](Index k) {
        try {
            const VectorX<T> xk = chart.col(k);
            const MetricSample<T> metric = field.sample(xk);
            const TensionVector<T> tension = tension_field(map, metric, xk);
            ratios[static_cast<std::size_t>(k)] = tension.tau.norm() / tension.energy_density;
        } catch (const Error& e) {
            errors[static_cast<std::size_t>(k)] = e.what();
        }
    });
    for (Index k = 0; k < count; ++k) {
        if (!errors[static_cast<std::size_t>(k)].empty())
            throw SingularMetric("sample " + std::to_string(k) + ": " +
                                 errors[static_cast<std::size_t>(k)]);
    }

    VerificationReport<T> report;
    report.sample_count = count;
    report.sup_ratio = *std::max_element(ratios.begin(), ratios.end());

    const Cone<T> cone = min_enclosing_cone(points, o, spec.seed);
    report.cone = cone;
    VectorX<T> v = cone.axis;
    T lhs = std::cos(cone.width);
    if (axis_hint) {
        v = *axis_hint;
        if (std::abs(v.norm() - T(1)) > T(1e-10))
            throw InvalidParams("axis hint must be a unit vector");
        const DirectionSet<T> set = make_direction_set(points, o);
        lhs = std::cos(detail::max_angle_to(set.directions, v));
    }
    report.lhs = lhs;
    report.d = plane_distance(points, o, v);

    const T eta = isometric ? static_cast<T>(map.dim_domain()) : T(1);
    const AetaResult<T> a = compute_A(eta, spec.seed);
    report.a_eta = eta;
    report.a_value = a.value;

    report.rhs_raw = theorem1_bound(report.d, report.sup_ratio, a.value);
    report.rhs_bound = std::min(T(1), report.rhs_raw);
    report.unconstrained = report.rhs_raw > T(1);
    report.margin = report.rhs_bound - report.lhs;
    report.satisfied = report.margin >= -T(1e-9);
    return report;
}

// Isometric-immersion variant: fits the cone, verifies the codimension
// restriction, spot-checks Sect <= chi^2 on sampled planes, and evaluates
// the curvature-based bound.
template <typename T>
VerificationReport<T> certify_theorem2(const ChartedMap<T>& map, const VectorX<T>& o, T chi,
                                       const SampleSpec& spec,
                                       const std::optional<VectorX<T>>& axis_hint = std::nullopt) {
    const Index m = map.dim_domain();
    const Index codim = map.dim_ambient() - m;
    if (!(codim > 0 && codim < m))
        throw CodimensionOutOfRange("requires 0 < n - m < m");

    const MatrixX<T> chart = make_chart_samples(map, spec);
    const MatrixX<T> points = map_samples(map, chart);

    VerificationReport<T> report;
    report.sample_count = chart.cols();

    // curvature spot check on a deterministic subset
    const Index spot = std::min<Index>(chart.cols(), 50);
    Rng rng(spec.seed);
    for (Index t = 0; t < spot; ++t) {
        const Index k = static_cast<Index>(rng.index(static_cast<std::size_t>(chart.cols())));
        const VectorX<T> xk = chart.col(k);
        const MetricSample<T> metric = pullback_metric(map, xk);
        const SecondFundamentalForm<T> ii = second_fundamental_form(map, xk);
        Eigen::LLT<MatrixX<T>> llt(metric.g);
        const MatrixX<T> basis = llt.matrixL().transpose().solve(MatrixX<T>::Identity(m, m));
        for (Index p = 0; p < m && report.failures.size() < 16; ++p) {
            for (Index q = p + 1; q < m; ++q) {
                const VectorX<T> xx = ii.contract(basis.col(p));
                const VectorX<T> yy = ii.contract(basis.col(q));
                const VectorX<T> xy = ii.contract(basis.col(p), basis.col(q));
                const T sect = xx.dot(yy) - xy.squaredNorm();
                if (sect > chi * chi + T(1e-9))
                    report.failures.push_back("sample " + std::to_string(k) +
                                              ": sectional curvature exceeds chi^2");
            }
        }
    }

    const Cone<T> cone = min_enclosing_cone(points, o, spec.seed);
    report.cone = cone;
    VectorX<T> v = cone.axis;
    T lhs = std::cos(cone.width);
    if (axis_hint) {
        v = *axis_hint;
        if (std::abs(v.norm() - T(1)) > T(1e-10))
            throw InvalidParams("axis hint must be a unit vector");
        const DirectionSet<T> set = make_direction_set(points, o);
        lhs = std::cos(detail::max_angle_to(set.directions, v));
    }
    report.lhs = lhs;
    report.d = plane_distance(points, o, v);

    const AetaResult<T> a1 = compute_A(T(1), spec.seed);
    report.a_eta = T(1);
    report.a_value = a1.value;
    report.parameters.emplace_back("chi", chi);

    report.rhs_raw = theorem2_bound(report.d, chi, a1.value);
    report.rhs_bound = std::min(T(1), report.rhs_raw);
    report.unconstrained = report.rhs_raw > T(1);
    report.margin = report.rhs_bound - report.lhs;
    report.satisfied = report.margin >= -T(1e-9) && report.failures.empty();
    return report;
}

// ---------------------------------------------------------------------------
// Consistency sweep over the proof's analytic identities for one map:
// Laplacian identity, superlevel-region bounds, Lu floor, and the
// geodesic-direction Hessian formula.
// ---------------------------------------------------------------------------

template <typename T>
struct ProofIdentitySummary {
    Index sample_count = 0;
    AuxParams<T> params;
    T u_base = T(0);
    bool base_positive = false;
    Index omega_count = 0;
    Index limitato_violations = 0;
    Index upperbound_violations = 0;
    Index richiestachi_violations = 0;
    T max_rel_delta_u = T(0);   // analytic vs finite-difference Laplacian
    T max_rel_hess = T(0);      // geodesic formula vs coordinate Hessian
    T min_lu = T(0);
    T delta_floor = T(0);
    bool lu_positive = false;
};

template <typename T>
T relative_gap(T lhs, T rhs, T floor = T(1e-8)) {
    return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), floor});
}

// Auto-configured run mirroring the proof: b from the fitted cone (unless
// overridden), T from the base sample height, x_o at the median of u.
template <typename T>
ProofIdentitySummary<T> run_proof_identities(const ChartedMap<T>& map, const VectorX<T>& o,
                                             const SampleSpec& spec, T xi = T(0.5),
                                             T alpha = T(0.5),
                                             std::optional<T> b_override = std::nullopt,
                                             Index laplacian_checks = 60,
                                             Index hessian_checks = 20) {
    const MatrixX<T> chart = make_chart_samples(map, spec);
    const MatrixX<T> points = map_samples(map, chart);
    const Index count = chart.cols();

    const Cone<T> cone = min_enclosing_cone(points, o, spec.seed);
    const VectorX<T> v = cone.axis;
    const T b = b_override.value_or(std::cos(cone.width) * (T(1) - T(1e-12)));

    // median-u base sample for a non-trivial region, computed with a
    // provisional T = 1 (the ordering of u does not depend on T)
    std::vector<Index> order(static_cast<std::size_t>(count));
    std::iota(order.begin(), order.end(), Index(0));
    {
        AuxParams<T> provisional(T(1), b, xi, alpha);
        std::vector<T> u(static_cast<std::size_t>(count));
        for (Index k = 0; k < count; ++k)
            u[static_cast<std::size_t>(k)] = aux_u_of_point<T>(points.col(k), o, v, provisional);
        std::sort(order.begin(), order.end(),
                  [&](Index lhs, Index rhs) { return u[static_cast<std::size_t>(lhs)] < u[static_cast<std::size_t>(rhs)]; });
    }
    const Index base = order[static_cast<std::size_t>(count / 2)];
    const T t_ref = (points.col(base) - o).dot(v);
    if (!(t_ref > T(0)))
        throw InvalidParams("base sample lies on or below the vertex hyperplane");

    AuxParams<T> params(t_ref, b, xi, alpha);
    ProofIdentitySummary<T> summary{0, params};
    summary.sample_count = count;

    const MetricField<T> field = induced_metric_field(map);

    // Laplacian identity on a deterministic random subset
    Rng rng(spec.seed + 1);
    for (Index t = 0; t < std::min(laplacian_checks, count); ++t) {
        const Index k = static_cast<Index>(rng.index(static_cast<std::size_t>(count)));
        const VectorX<T> xk = chart.col(k);
        const AuxQuantities<T> aux = aux_quantities(map, field, xk, params, o, v, true);
        summary.max_rel_delta_u =
            std::max(summary.max_rel_delta_u,
                     relative_gap(aux.delta_u_analytic, aux.delta_u_numeric, T(1e-6)));
    }

    const OmegaRegion<T> region = omega_region(points, o, v, params, base);
    summary.u_base = region.u_base;
    summary.base_positive = region.base_positive;
    summary.omega_count = static_cast<Index>(region.indices.size());
    summary.limitato_violations = static_cast<Index>(region.limitato_violations.size());
    summary.upperbound_violations = static_cast<Index>(region.upperbound_violations.size());

    const FinaleResult<T> finale =
        finale_check(map, field, chart, region.indices, params, o, v);
    summary.richiestachi_violations = static_cast<Index>(finale.richiestachi_violations.size());
    summary.min_lu = finale.min_lu;
    summary.delta_floor = finale.delta_floor;
    summary.lu_positive = finale.positive;

    // geodesic-direction Hessian identity at random samples and directions
    const Index m = map.dim_domain();
    auto u_field = [&map, &o, &v, &params](const VectorX<T>& y) {
        const VectorX<T> wy = map.evaluate(y) - o;
        return std::sqrt(params.t_ref() * params.t_ref() +
                         params.a() * params.a() * wy.squaredNorm()) -
               wy.dot(v);
    };
    for (Index t = 0; t < hessian_checks; ++t) {
        const Index k = static_cast<Index>(rng.index(static_cast<std::size_t>(count)));
        const VectorX<T> xk = chart.col(k);
        const MetricSample<T> metric = pullback_metric(map, xk);
        VectorX<T> dir(m);
        for (Index i = 0; i < m; ++i) dir(i) = static_cast<T>(rng.normal());
        const T norm_g = std::sqrt(dir.dot(metric.g * dir));
        if (norm_g < T(1e-8)) continue;
        dir /= norm_g;
        const T direct = hess_u_direction(map, xk, dir, params, o, v);
        const MatrixX<T> hess = hessian_scalar<T>(u_field, field, xk);
        const T generic = dir.dot(hess * dir);
        summary.max_rel_hess =
            std::max(summary.max_rel_hess, relative_gap(direct, generic, T(1e-6)));
    }
    return summary;
}

}  // namespace conebound
