#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "conebound/cone.hpp"
#include "conebound/geometry.hpp"
#include "conebound/metric.hpp"
#include "conebound/models.hpp"
#include "conebound/sampling.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace conebound;
using Vec = VectorX<double>;
using Mat = MatrixX<double>;

namespace {

Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

// map composed with an orthogonal chart change: psi(x) = phi(Q x)
ChartedMap<double> reparametrize(const ChartedMap<double>& map, const Mat& q) {
    const Index m = map.dim_domain();
    auto eval = [&map, q](const Vec& x) { return map.evaluate(q * x); };
    auto jet = [&map, q, m](const Vec& x) {
        const Jet<double> inner = map.jet(q * x);
        Jet<double> out;
        out.value = inner.value;
        out.first = inner.first * q;
        out.second.resize(inner.second.rows(), m * m);
        for (Index i = 0; i < m; ++i)
            for (Index j = 0; j < m; ++j) {
                Vec acc = Vec::Zero(inner.second.rows());
                for (Index k = 0; k < m; ++k)
                    for (Index l = 0; l < m; ++l) acc += q(k, i) * q(l, j) * inner.d2(k, l);
                out.second.col(i * m + j) = acc;
            }
        return out;
    };
    return ChartedMap<double>(m, map.dim_ambient(), eval, jet, map.domain_box());
}

ChartedMap<double> scale_map(const ChartedMap<double>& map, double lambda) {
    auto eval = [&map, lambda](const Vec& x) { return Vec(lambda * map.evaluate(x)); };
    auto jet = [&map, lambda](const Vec& x) {
        Jet<double> out = map.jet(x);
        out.value *= lambda;
        out.first *= lambda;
        out.second *= lambda;
        return out;
    };
    return ChartedMap<double>(map.dim_domain(), map.dim_ambient(), eval, jet, map.domain_box());
}

}  // namespace

TEST_CASE("pullback metric on built-in surfaces") {
    const auto fam = paraboloid_family<double>(2, 0.7, 10.0);

    SUBCASE("graph critical point gives the identity") {
        const auto g = pullback_metric(fam.map, vec2(0, 0));
        CHECK((g.g - Mat::Identity(2, 2)).norm() < 1e-12);
        CHECK(g.inverse_defect() < 1e-10);
        CHECK(g.positive_definite());
    }
    SUBCASE("g_ij = delta_ij + 4 x_i x_j") {
        const auto g = pullback_metric(fam.map, vec2(1, 0));
        CHECK(g.g(0, 0) == doctest::Approx(5.0).epsilon(1e-12));
        CHECK(g.g(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(g.g(0, 1)) < 1e-12);
    }
    SUBCASE("flat cone chart has ds^2 = 2 dr^2 + r^2 dtheta^2") {
        const auto cone = flat_cone_surface<double>(1e-3, 3.0);
        const auto g = pullback_metric(cone, vec2(1.0, 0.0));
        CHECK(g.g(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(g.g(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
        const auto g2 = pullback_metric(cone, vec2(1.7, 2.3));
        CHECK(g2.g(1, 1) == doctest::Approx(1.7 * 1.7).epsilon(1e-12));
    }
    SUBCASE("jet value equals evaluate; christoffels symmetric") {
        const Vec x = vec2(0.7, -1.3);
        CHECK((fam.map.jet(x).value - fam.map.evaluate(x)).norm() < 1e-14);
        CHECK(pullback_metric(fam.map, x).christoffel_asymmetry() < 1e-12);
    }
    SUBCASE("rank-deficient differential raises SingularMetric") {
        ChartedMap<double> degenerate(2, 3,
                                      [](const Vec& x) {
                                          Vec out(3);
                                          out << x(0), 0.0, 0.0;
                                          return out;
                                      },
                                      centered_box<double>(2, 1.0));
        CHECK_THROWS_AS(pullback_metric(degenerate, vec2(0.3, 0.4)), SingularMetric);
    }
}

TEST_CASE("energy density") {
    SUBCASE("induced metric gives m") {
        for (Index m : {2, 3, 5}) {
            const auto fam = paraboloid_family<double>(m, 0.3, 10.0);
            Rng rng(11);
            for (int t = 0; t < 20; ++t) {
                Vec x(m);
                for (Index i = 0; i < m; ++i) x(i) = rng.uniform(-10, 10);
                const auto g = pullback_metric(fam.map, x);
                CHECK(energy_density(fam.map, g, x) ==
                      doctest::Approx(static_cast<double>(m)).epsilon(1e-8));
            }
        }
    }
    SUBCASE("scaled identity on a Euclidean chart gives lambda^2 m") {
        const Index m = 3;
        const double lambda = 1.7;
        ChartedMap<double> map(m, m, [lambda](const Vec& x) { return Vec(lambda * x); },
                               centered_box<double>(m, 2.0));
        const MetricField<double> euclid = euclidean_metric_field<double>(m);
        const Vec x = Vec::Constant(m, 0.4);
        const auto g = euclid.sample(x);
        CHECK(energy_density(map, g, x) ==
              doctest::Approx(lambda * lambda * m).epsilon(1e-8));
        // identity map itself
        ChartedMap<double> id(m, m, [](const Vec& x) { return x; }, centered_box<double>(m, 2.0));
        CHECK(energy_density(id, g, x) == doctest::Approx(static_cast<double>(m)).epsilon(1e-8));
    }
}

TEST_CASE("christoffel symbols of explicit metric fields") {
    SUBCASE("Euclidean metric has vanishing symbols") {
        const auto gamma =
            christoffel(euclidean_metric_field<double>(3), Vec(Vec::Constant(3, 0.7)));
        for (const auto& gk : gamma) CHECK(gk.norm() < 1e-12);
    }
    SUBCASE("flat cone metric at r = 1") {
        const auto gamma = christoffel(flat_cone_metric_field<double>(), vec2(1.0, 0.4));
        CHECK(gamma[0](1, 1) == doctest::Approx(-0.5).epsilon(1e-10));   // Gamma^r_tt
        CHECK(gamma[1](0, 1) == doctest::Approx(1.0).epsilon(1e-10));    // Gamma^t_rt
        CHECK(gamma[0](0, 0) == doctest::Approx(0.0).epsilon(1e-10));
    }
    SUBCASE("finite differences of g agree with the analytic derivative") {
        MetricField<double> fd = flat_cone_metric_field<double>();
        fd.derivative = nullptr;
        const auto gamma = christoffel(fd, vec2(1.0, 0.4));
        CHECK(gamma[0](1, 1) == doctest::Approx(-0.5).epsilon(1e-8));
        CHECK(gamma[1](0, 1) == doctest::Approx(1.0).epsilon(1e-8));
    }
    SUBCASE("polar Euclidean metric at r = 2") {
        const auto gamma = christoffel(polar_metric_field<double>(), vec2(2.0, 1.0));
        CHECK(gamma[0](1, 1) == doctest::Approx(-2.0).epsilon(1e-10));
        CHECK(gamma[1](0, 1) == doctest::Approx(0.5).epsilon(1e-10));
    }
}

TEST_CASE("tension field") {
    SUBCASE("paraboloid tension at the origin") {
        for (Index m : {2, 3, 5}) {
            const auto fam = paraboloid_family<double>(m, 0.1, 10.0);
            const Vec x = Vec::Zero(m);
            const auto tension = tension_field(fam.map, pullback_metric(fam.map, x), x);
            CHECK(tension.tau.norm() ==
                  doctest::Approx(2.0 * static_cast<double>(m)).epsilon(1e-10));
            CHECK(tension.energy_density ==
                  doctest::Approx(static_cast<double>(m)).epsilon(1e-10));
        }
    }
    SUBCASE("affine maps are harmonic for the flat metric") {
        Mat a(3, 2);
        a << 1.0, 0.5, -0.25, 2.0, 0.75, -1.0;
        Vec c(3);
        c << 0.1, -0.2, 0.3;
        ChartedMap<double> map(2, 3, [a, c](const Vec& x) { return Vec(a * x + c); },
                               centered_box<double>(2, 2.0));
        const MetricField<double> euclid = euclidean_metric_field<double>(2);
        const Vec x = vec2(0.3, -0.8);
        const auto tension = tension_field(map, euclid.sample(x), x);
        CHECK(tension.tau.norm() < 1e-7);
    }
    SUBCASE("round sphere has |tau| = 2/R and a normal tension vector") {
        const double radius = 2.0;
        Vec center(3);
        center << 0, 0, 6;
        const auto sphere = sphere_surface<double>(radius, center);
        const Vec x = vec2(1.1, 0.7);
        const auto jet = sphere.jet(x);
        const auto tension = tension_field(sphere, pullback_metric(sphere, x), x);
        CHECK(tension.tau.norm() == doctest::Approx(2.0 / radius).epsilon(1e-10));
        // tau = m H points to the center
        const Vec inward = (center - jet.value).normalized();
        CHECK((tension.tau.normalized() - inward).norm() < 1e-10);
        CHECK(std::abs(tension.tau.dot(jet.first.col(0))) < 1e-6);
        CHECK(std::abs(tension.tau.dot(jet.first.col(1))) < 1e-6);
    }
}

TEST_CASE("second fundamental form") {
    SUBCASE("affine plane is totally geodesic") {
        const auto plane = plane_surface<double>(1.0, 2.0);
        const auto ii = second_fundamental_form(plane, vec2(0.4, -0.9));
        CHECK(ii.values.norm() < 1e-12);
    }
    SUBCASE("sphere is umbilic with |II(X,X)| = 1/R") {
        const double radius = 1.5;
        Vec center = Vec::Zero(3);
        const auto sphere = sphere_surface<double>(radius, center);
        const Vec x = vec2(0.9, 2.0);
        const auto metric = pullback_metric(sphere, x);
        const auto ii = second_fundamental_form(sphere, x);
        Rng rng(5);
        for (int t = 0; t < 8; ++t) {
            Vec w = vec2(rng.normal(), rng.normal());
            w /= std::sqrt(w.dot(metric.g * w));
            CHECK(ii.contract(w).norm() == doctest::Approx(1.0 / radius).epsilon(1e-8));
        }
        CHECK(ii.tangential_defect() < 1e-8);
    }
    SUBCASE("paraboloid at the origin: II(d_i, d_j) = 2 delta_ij e_3") {
        const auto fam = paraboloid_family<double>(2, 0.25, 10.0);
        const auto ii = second_fundamental_form(fam.map, vec2(0, 0));
        Vec normal(3);
        normal << 0, 0, 1;
        CHECK((ii.value(0, 0) - 2.0 * normal).norm() < 1e-10);
        CHECK((ii.value(1, 1) - 2.0 * normal).norm() < 1e-10);
        CHECK(ii.value(0, 1).norm() < 1e-10);
    }
    SUBCASE("trace identity: g^{ij} II_ij = tau") {
        const auto fam = paraboloid_family<double>(3, 0.5, 10.0);
        Rng rng(21);
        for (int t = 0; t < 10; ++t) {
            Vec x(3);
            for (Index i = 0; i < 3; ++i) x(i) = rng.uniform(-3, 3);
            const auto metric = pullback_metric(fam.map, x);
            const auto ii = second_fundamental_form(fam.map, x);
            const auto tension = tension_field(fam.map, metric, x);
            CHECK((ii.trace(metric.g_inv) - tension.tau).norm() < 1e-8);
            for (Index i = 0; i < 3; ++i)
                for (Index j = i + 1; j < 3; ++j)
                    CHECK((ii.value(i, j) - ii.value(j, i)).norm() < 1e-12);
        }
    }
}

TEST_CASE("sectional curvature via the Gauss equation") {
    SUBCASE("affine plane is flat") {
        const auto plane = plane_surface<double>(1.0, 2.0);
        const Vec x = vec2(0.1, 0.2);
        CHECK(std::abs(sectional_curvature(plane, x, vec2(1, 0), vec2(0, 1))) < 1e-12);
    }
    SUBCASE("flat cone surface is flat away from the apex") {
        const auto cone = flat_cone_surface<double>(0.1, 3.0);
        const Mat samples = grid_samples(cone.domain_box(), 7);
        for (Index k = 0; k < samples.cols(); ++k) {
            const Vec x = samples.col(k);
            const auto metric = pullback_metric(cone, x);
            Vec e1 = vec2(1, 0), e2 = vec2(0, 1);
            e1 /= std::sqrt(e1.dot(metric.g * e1));
            e2 /= std::sqrt(e2.dot(metric.g * e2));
            CHECK(std::abs(sectional_curvature(cone, x, e1, e2)) < 1e-6);
        }
    }
    SUBCASE("sphere has curvature 1/R^2") {
        const double radius = 1.5;
        const auto sphere = sphere_surface<double>(radius, Vec::Zero(3).eval());
        const Vec x = vec2(1.2, 0.5);
        const auto metric = pullback_metric(sphere, x);
        Vec e1 = vec2(1, 0);
        e1 /= std::sqrt(e1.dot(metric.g * e1));
        Vec e2 = vec2(0, 1);
        e2 -= e2.dot(metric.g * e1) * e1;
        e2 /= std::sqrt(e2.dot(metric.g * e2));
        CHECK(sectional_curvature(sphere, x, e1, e2) ==
              doctest::Approx(1.0 / (radius * radius)).epsilon(1e-8));
    }
    SUBCASE("non-orthonormal plane input raises DegeneratePlane") {
        const auto plane = plane_surface<double>(1.0, 2.0);
        CHECK_THROWS_AS(
            sectional_curvature(plane, vec2(0, 0), vec2(1, 0), vec2(1, 0)),
            DegeneratePlane);
        CHECK_THROWS_AS(
            sectional_curvature(plane, vec2(0, 0), vec2(2, 0), vec2(0, 1)),
            DegeneratePlane);
    }
}

TEST_CASE("hessian of scalar fields") {
    SUBCASE("Euclidean: Hess |x|^2/2 = I, Hess linear = 0") {
        const MetricField<double> euclid = euclidean_metric_field<double>(3);
        auto quad = [](const Vec& x) { return 0.5 * x.squaredNorm(); };
        const Mat h = hessian_scalar<double>(quad, euclid, Vec::Constant(3, 0.3));
        CHECK((h - Mat::Identity(3, 3)).norm() < 1e-6);
        auto lin = [](const Vec& x) { return 2.0 * x(0) - x(2); };
        CHECK(hessian_scalar<double>(lin, euclid, Vec::Constant(3, 0.3)).norm() < 1e-6);
    }
    SUBCASE("flat cone metric: Hess(r) in the theta-theta slot is r/2") {
        auto radial = [](const Vec& x) { return x(0); };
        const Mat h =
            hessian_scalar<double>(radial, flat_cone_metric_field<double>(), vec2(1.0, 0.3));
        CHECK(h(1, 1) == doctest::Approx(0.5).epsilon(1e-7));
        CHECK(std::abs(h(0, 0)) < 1e-7);
    }
    SUBCASE("orthonormal-frame output rescales by the metric") {
        auto radial = [](const Vec& x) { return x(0); };
        const Mat h = hessian_scalar<double>(radial, flat_cone_metric_field<double>(),
                                             vec2(1.0, 0.3), true);
        // coordinate value 1/2 divided by g_tt = r^2 = 1, and by g_rr = 2 rows
        CHECK(h(1, 1) == doctest::Approx(0.5).epsilon(1e-7));
        const MetricField<double> euclid = euclidean_metric_field<double>(2);
        auto quad = [](const Vec& x) { return 0.5 * x.squaredNorm(); };
        CHECK((hessian_scalar<double>(quad, euclid, vec2(0.1, 0.2), true) -
               Mat::Identity(2, 2)).norm() < 1e-6);
    }
}

TEST_CASE("jet properties") {
    SUBCASE("analytic jets are symmetric to 1e-10, finite-difference to 1e-6") {
        const auto fam = paraboloid_family<double>(3, 0.5, 10.0);
        const Vec x = Vec::Constant(3, 0.8);
        CHECK(fam.map.jet(x).symmetry_defect() < 1e-10);
        auto fd = make_graph_map_fd<double>(3, [](const Vec& y) { return y.squaredNorm() + 0.5; },
                                            centered_box<double>(3, 10.0));
        CHECK(fd.jet(x).symmetry_defect() < 1e-6);
        CHECK(fd.jet_kind() == JetKind::finite_difference);
    }
    SUBCASE("finite-difference jets track analytic jets to 1e-4 relative") {
        const auto sphere = sphere_surface<double>(1.0, Vec::Zero(3).eval());
        const auto cone = flat_cone_surface<double>(0.1, 3.0);
        const auto fam = paraboloid_family<double>(2, 0.25, 10.0);
        const ChartedMap<double>* maps[] = {&sphere, &cone, &fam.map};
        Rng rng(3);
        for (const auto* map : maps) {
            const Box<double>& box = map->domain_box();
            for (int t = 0; t < 100; ++t) {
                Vec x(2);
                for (Index i = 0; i < 2; ++i)
                    x(i) = rng.uniform(box.min()(i), box.max()(i));
                const Jet<double> exact = map->jet(x);
                const Jet<double> approx = map->finite_difference_jet(x);
                const double scale1 = std::max(1.0, exact.first.norm());
                const double scale2 = std::max(1.0, exact.second.norm());
                CHECK((exact.first - approx.first).norm() / scale1 < 1e-4);
                CHECK((exact.second - approx.second).norm() / scale2 < 1e-4);
            }
        }
    }
}

TEST_CASE("frame independence under orthogonal chart changes") {
    const auto fam = paraboloid_family<double>(3, 0.4, 10.0);
    Rng rng(17);
    const Mat q = oracles::random_rotation(3, rng);
    const auto re = reparametrize(fam.map, q);
    for (int t = 0; t < 10; ++t) {
        Vec x(3);
        for (Index i = 0; i < 3; ++i) x(i) = rng.uniform(-2, 2);
        const Vec y = q.transpose() * x;   // re(y) = fam.map(x)

        const auto m1 = pullback_metric(fam.map, x);
        const auto m2 = pullback_metric(re, y);
        CHECK(energy_density(fam.map, m1, x) ==
              doctest::Approx(energy_density(re, m2, y)).epsilon(1e-8));

        const auto t1 = tension_field(fam.map, m1, x);
        const auto t2 = tension_field(re, m2, y);
        CHECK(t1.tau.norm() == doctest::Approx(t2.tau.norm()).epsilon(1e-8));

        // g-orthonormal plane, transported through the chart change
        Vec e1(3), e2(3);
        e1 << 1, 0, 0;
        e2 << 0, 1, 0;
        e1 /= std::sqrt(e1.dot(m1.g * e1));
        e2 -= e2.dot(m1.g * e1) * e1;
        e2 /= std::sqrt(e2.dot(m1.g * e2));
        const Vec f1 = q.transpose() * e1;
        const Vec f2 = q.transpose() * e2;
        CHECK(sectional_curvature(fam.map, x, e1, e2) ==
              doctest::Approx(sectional_curvature(re, y, f1, f2)).epsilon(1e-8));
    }
}

TEST_CASE("homothety leaves d(pi_v, phi(M)) sup(|tau|/|dphi|^2) unchanged") {
    const auto fam = paraboloid_family<double>(2, 0.25, 10.0);
    const double lambda = 2.37;
    const auto scaled = scale_map(fam.map, lambda);

    const SampleSpec spec{SampleMode::radial_log, 400, 0, 1e-3};
    const Mat chart = make_chart_samples(fam.map, spec);

    Vec o = Vec::Zero(3);
    Vec axis(3);
    axis << 0, 0, 1;

    auto product = [&](const ChartedMap<double>& map, const Vec& vertex) {
        double sup = 0;
        for (Index k = 0; k < chart.cols(); ++k) {
            const Vec x = chart.col(k);
            const auto tension = tension_field(map, pullback_metric(map, x), x);
            sup = std::max(sup, tension.tau.norm() / tension.energy_density);
        }
        return plane_distance(map_samples(map, chart), vertex, axis) * sup;
    };
    const double base = product(fam.map, o);
    const double moved = product(scaled, Vec(lambda * o));
    CHECK(base == doctest::Approx(moved).epsilon(1e-8));
}

TEST_CASE("scalar template instantiates at float precision") {
    const auto fam = paraboloid_family<float>(2, 0.25f, 10.0f);
    VectorX<float> x = VectorX<float>::Zero(2);
    const auto tension = tension_field(fam.map, pullback_metric(fam.map, x), x);
    CHECK(tension.tau.norm() == doctest::Approx(4.0f).epsilon(1e-4));
    CHECK(tension.energy_density == doctest::Approx(2.0f).epsilon(1e-4));
}
