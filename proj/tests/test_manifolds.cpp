#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rbm/manifold.hpp"

using namespace rbm;

namespace {

std::mt19937& rng() {
    static std::mt19937 gen(777);
    return gen;
}
double uniform(double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(rng());
}
Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}
Vec random_unit(int nb) {
    std::normal_distribution<double> d;
    Vec x(nb);
    for (int i = 0; i < nb; ++i) x(i) = d(rng());
    return x / x.norm();
}
Vec flatten_rm(const Mat& m) {
    Vec v(m.rows() * m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
    return v;
}
Eigen::Matrix3d random_rotation() {
    Eigen::Vector3d w;
    for (int i = 0; i < 3; ++i) w(i) = uniform(-2.0, 2.0);
    return oracle::rotation_exp(w);
}

}  // namespace

TEST_CASE("catalog lists the seven manifolds") {
    auto names = catalog_names();
    std::vector<std::string> want = {"sphere2-chart", "torus2-chart", "torus2-group",
                                     "hyperbolic-n", "sphere-n", "so3", "aff-line"};
    CHECK(names.size() == want.size());
    for (const auto& n : want)
        CHECK(std::find(names.begin(), names.end(), n) != names.end());

    for (const auto& n : names) {
        auto m = make_manifold(n);
        CHECK(m->name == n);
        CHECK(m->dim >= 1);
        CHECK(m->state_dim >= m->dim);
        CHECK(m->has(m->default_backend));
        CHECK(m->default_start.size() == m->state_dim);
        CHECK(m->valid_state(m->default_start));
    }

    CHECK_THROWS_AS(make_manifold("klein-bottle"), UsageError);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(make_torus2_chart(1.0, 1.5), UsageError);  // needs R > r
    CHECK_THROWS_AS(make_torus2_chart(2.0, -1.0), UsageError);
    CHECK_THROWS_AS(make_hyperbolic(1), UsageError);
    CHECK_THROWS_AS(make_sphere_embedded(1), UsageError);
    CHECK_THROWS_AS(make_manifold("torus2-chart", {{"R", 1.0}, {"r", 2.0}}), UsageError);
    auto m = make_manifold("hyperbolic-n", {{"n", 4.0}});
    CHECK(m->dim == 4);
}

TEST_CASE("sphere chart matches closed forms") {
    auto m = make_sphere2_chart();
    CHECK(m->dim == 2);
    CHECK(m->state_dim == 2);
    CHECK(m->default_backend == Backend::chart);
    CHECK(m->has(Backend::chart));
    CHECK_FALSE(m->has(Backend::embedded));
    REQUIRE(bool(m->christoffel));
    REQUIRE(bool(m->stratonovich_drift.value));

    for (int trial = 0; trial < 50; ++trial) {
        Vec p = vec2(uniform(0.15, M_PI - 0.15), uniform(0, 2 * M_PI));
        CHECK((m->metric(p) - Mat(oracle::s2_metric(p(0)))).cwiseAbs().maxCoeff() <
              1e-14);

        auto cs = m->christoffel(p);
        CHECK(std::abs(cs.gamma[0](1, 1) - oracle::s2_gamma_t_pp(p(0))) < 1e-12);
        CHECK(std::abs(cs.gamma[1](0, 1) - oracle::s2_gamma_p_tp(p(0))) < 1e-12);
        CHECK(std::abs(cs.gamma[0](0, 0)) < 1e-12);

        // frame orthonormality: E^T g E = I
        Mat e = m->frame(p);
        CHECK((e.transpose() * m->metric(p) * e - Mat::Identity(2, 2))
                  .cwiseAbs()
                  .maxCoeff() < 1e-12);

        Vec d = m->stratonovich_drift(p);
        CHECK((d - Vec(oracle::s2_strat_drift(p(0)))).norm() < 1e-12);
    }

    CHECK(m->chart_valid(vec2(0.5, 1.0)));
    CHECK_FALSE(m->chart_valid(vec2(0.0, 1.0)));
    CHECK_FALSE(m->chart_valid(vec2(-0.1, 1.0)));
    CHECK_FALSE(m->chart_valid(vec2(M_PI, 1.0)));
    CHECK(m->valid_state(vec2(1.0, 0.0)));
    CHECK_FALSE(m->valid_state(vec2(3.5, 0.0)));
    CHECK(m->residual(vec2(1.0, 0.0)) == 0.0);
}

TEST_CASE("torus chart matches closed forms for default and custom radii") {
    for (auto [R, r] : {std::pair{2.0, 1.0}, std::pair{3.0, 0.5}}) {
        auto m = make_torus2_chart(R, r);
        CHECK(m->params.at("R") == R);
        CHECK(m->params.at("r") == r);
        for (int trial = 0; trial < 50; ++trial) {
            Vec p = vec2(uniform(0, 2 * M_PI), uniform(0, 2 * M_PI));
            CHECK((m->metric(p) - Mat(oracle::torus_metric(R, r, p(0))))
                      .cwiseAbs()
                      .maxCoeff() < 1e-14);
            auto cs = m->christoffel(p);
            CHECK(std::abs(cs.gamma[0](1, 1) - oracle::torus_gamma_t_pp(R, r, p(0))) <
                  1e-12);
            CHECK(std::abs(cs.gamma[1](1, 0) - oracle::torus_gamma_p_tp(R, r, p(0))) <
                  1e-12);
            Vec d = m->stratonovich_drift(p);
            CHECK((d - Vec(oracle::torus_strat_drift(R, r, p(0)))).norm() < 1e-12);
            Mat e = m->frame(p);
            CHECK((e.transpose() * m->metric(p) * e - Mat::Identity(2, 2))
                      .cwiseAbs()
                      .maxCoeff() < 1e-12);
        }
        // angles wrap, the whole plane is a valid chart domain
        CHECK(m->valid_state(vec2(17.0, -40.0)));
    }
}

TEST_CASE("hyperbolic upper half space matches closed forms") {
    for (int n : {2, 3, 4}) {
        auto m = make_hyperbolic(n);
        CHECK(m->dim == n);
        CHECK(m->positivity_retry);
        for (int trial = 0; trial < 30; ++trial) {
            Vec p(n);
            for (int i = 0; i + 1 < n; ++i) p(i) = uniform(-2, 2);
            p(n - 1) = uniform(0.4, 3.0);

            Mat g = m->metric(p);
            double xn2 = p(n - 1) * p(n - 1);
            CHECK((g - Mat(Mat::Identity(n, n) / xn2)).cwiseAbs().maxCoeff() < 1e-14);

            auto cs = m->christoffel(p);
            for (int k = 0; k < n; ++k)
                CHECK((cs.gamma[k] - Mat(oracle::hyperbolic_gamma(n, p, k)))
                          .cwiseAbs()
                          .maxCoeff() < 1e-12);

            Vec d = m->stratonovich_drift(p);
            CHECK((d - Vec(oracle::hyperbolic_strat_drift(n, p))).norm() < 1e-12);
        }
        Vec bad = m->default_start;
        bad(n - 1) = -0.5;
        CHECK_FALSE(m->valid_state(bad));
    }
}

TEST_CASE("analytic christoffel symbols agree with the metric derivative route") {
    // fifty random points per chart manifold, coordinate-wise within 1e-6
    struct Case {
        ManifoldPtr m;
        std::function<Vec()> sample;
    };
    std::vector<Case> cases = {
        {make_sphere2_chart(),
         [] { return vec2(uniform(0.2, M_PI - 0.2), uniform(0, 2 * M_PI)); }},
        {make_torus2_chart(2.0, 1.0),
         [] { return vec2(uniform(0, 2 * M_PI), uniform(0, 2 * M_PI)); }},
        {make_hyperbolic(3), [] {
             Vec p(3);
             p << uniform(-2, 2), uniform(-2, 2), uniform(0.4, 3.0);
             return p;
         }}};
    for (auto& c : cases) {
        double worst = 0;
        for (int trial = 0; trial < 50; ++trial) {
            Vec p = c.sample();
            auto analytic = c.m->christoffel(p);
            auto numeric = christoffel_from_metric(c.m->metric, p);
            for (int k = 0; k < c.m->dim; ++k)
                worst = std::max(
                    worst, (analytic.gamma[k] - numeric.gamma[k]).cwiseAbs().maxCoeff());
        }
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("embedded sphere descriptor") {
    for (int n : {2, 3}) {
        auto m = make_sphere_embedded(n);
        CHECK(m->dim == n);
        CHECK(m->state_dim == n + 1);
        CHECK(m->default_backend == Backend::embedded);
        CHECK(m->ambient_weight == 1.0);
        REQUIRE(bool(m->mean_curvature));

        for (int trial = 0; trial < 30; ++trial) {
            Vec x = random_unit(n + 1);
            CHECK((m->projection(x) - Mat(oracle::sphere_projection(x)))
                      .cwiseAbs()
                      .maxCoeff() < 1e-14);
            CHECK((m->mean_curvature(x) - Vec(oracle::sphere_mean_curvature(n, x)))
                      .norm() < 1e-12);
            CHECK(m->residual(x) < 1e-14);
            CHECK((m->retraction(1.3 * x) - x).norm() < 1e-12);
        }
        CHECK_FALSE(m->valid_state(1.1 * m->default_start));
        CHECK(std::abs(m->default_start.norm() - 1.0) < 1e-15);
    }
}

TEST_CASE("rotation group descriptor") {
    auto m = make_so3();
    CHECK(m->dim == 3);
    CHECK(m->state_dim == 9);
    CHECK(m->matrix_size == 3);
    CHECK(m->ambient_weight == 0.5);
    CHECK(m->has(Backend::embedded));
    CHECK(m->has(Backend::group));
    REQUIRE(bool(m->algebra));
    CHECK(m->algebra->dim == 3);
    CHECK(m->algebra->inner_weight == 0.5);

    for (int trial = 0; trial < 20; ++trial) {
        Eigen::Matrix3d R = random_rotation();
        Vec x = flatten_rm(R);
        CHECK(m->residual(x) < 1e-12);
        CHECK_FALSE(m->valid_state(1.05 * x));

        // projection agrees with the closed-form tangent projector
        Mat P = m->projection(x);
        for (int trial2 = 0; trial2 < 3; ++trial2) {
            Mat A = Mat::NullaryExpr(3, 3, [](Eigen::Index, Eigen::Index) {
                return uniform(-1, 1);
            });
            Vec got = P * flatten_rm(A);
            Vec want = flatten_rm(oracle::so3_projection_apply(R, A));
            CHECK((got - want).norm() < 1e-12);
        }

        CHECK((m->mean_curvature(x) - flatten_rm(oracle::so3_mean_curvature(R)))
                  .norm() < 1e-12);

        // retraction restores orthogonality after a small ambient kick
        Mat G = Mat::NullaryExpr(3, 3, [](Eigen::Index, Eigen::Index) {
            return uniform(-0.05, 0.05);
        });
        Vec y = m->retraction(flatten_rm(Eigen::Matrix3d(R + G)));
        CHECK(m->residual(y) < 1e-12);
        CHECK((y - x).norm() < 0.5);
    }

    // group translation is the closed-form exponential
    Vec c(3);
    c << 0.3, -0.7, 0.2;
    Eigen::Matrix3d R = random_rotation();
    Vec got = m->group_translate(flatten_rm(R), c);
    Eigen::Matrix3d want = R * oracle::rotation_exp(Eigen::Vector3d(0.3, -0.7, 0.2));
    CHECK((got - flatten_rm(want)).norm() < 1e-12);

    // structure constants levi-civita, zero canonical drift
    REQUIRE(bool(m->structure));
    CHECK(canonical_drift(*m->structure).norm() < 1e-12);
    CHECK(is_unimodular(*m->structure));
}

TEST_CASE("affine line descriptor") {
    auto m = make_aff_line();
    CHECK(m->dim == 2);
    CHECK(m->state_dim == 2);  // states are (a, b) with a > 0
    CHECK(m->default_backend == Backend::group);
    REQUIRE(bool(m->algebra));
    REQUIRE(bool(m->structure));

    Vec J = canonical_drift(*m->structure);
    CHECK((J - Vec(oracle::aff_canonical_drift_coeffs())).norm() < 1e-12);
    CHECK_FALSE(is_unimodular(*m->structure));

    // translation: [[a b];[0 1]] exp(c1 e1 + c2 e2), read back as (a, b)
    Vec g0 = vec2(2.0, -1.0);
    Vec c = vec2(0.25, 0.6);
    Vec got = m->group_translate(g0, c);
    Eigen::Matrix2d ex = oracle::aff_exp(std::sqrt(2.0) * 0.25, std::sqrt(2.0) * 0.6);
    double a_want = 2.0 * ex(0, 0);
    double b_want = 2.0 * ex(0, 1) + (-1.0);
    CHECK(std::abs(got(0) - a_want) < 1e-12);
    CHECK(std::abs(got(1) - b_want) < 1e-12);

    // identity coefficients leave the point fixed
    CHECK((m->group_translate(g0, Vec(Vec::Zero(2))) - g0).norm() < 1e-15);

    CHECK(m->valid_state(vec2(0.5, 3.0)));
    CHECK_FALSE(m->valid_state(vec2(-0.5, 3.0)));
}

TEST_CASE("group frame and ito drift closed forms match the exponential map") {
    for (const char* name : {"so3", "aff-line", "torus2-group"}) {
        auto m = make_manifold(name);
        REQUIRE(bool(m->group_frame));
        REQUIRE(bool(m->group_ito_drift));
        REQUIRE(bool(m->structure));
        Vec half_j = 0.5 * canonical_drift(*m->structure);

        Vec g = m->default_start;
        for (int k = 0; k < 3; ++k) {
            Vec c(m->dim);
            for (int i = 0; i < m->dim; ++i) c(i) = uniform(-0.4, 0.4);
            g = m->group_translate(g, c);
        }
        auto translate = [&](const Vec& c) { return m->group_translate(g, c); };
        Vec zero = Vec::Zero(m->dim);

        // columns of the group frame are translate derivatives at c = 0
        Mat sig = m->group_frame(g);
        for (int i = 0; i < m->dim; ++i) {
            Vec di = Vec::Zero(m->dim);
            di(i) = 1.0;
            CHECK((Vec(sig.col(i)) - directional_derivative(translate, zero, di))
                      .norm() < 1e-6);
        }

        // ito drift: first derivative along J/2 plus half the second
        // derivatives along the basis directions
        Vec want = half_j.norm() > 0 ? directional_derivative(translate, zero, half_j)
                                     : Vec(Vec::Zero(m->state_dim));
        double h = 1e-4;
        for (int i = 0; i < m->dim; ++i) {
            Vec di = Vec::Zero(m->dim);
            di(i) = 1.0;
            want += 0.5 * (translate(h * di) + translate(-h * di) - 2.0 * g) / (h * h);
        }
        CHECK((m->group_ito_drift(g) - want).norm() < 1e-5);
    }
}

TEST_CASE("flat torus group descriptor") {
    auto m = make_torus2_group(2.0, 1.0);
    CHECK(m->dim == 2);
    CHECK(m->state_dim == 2);
    CHECK(m->default_backend == Backend::group);
    CHECK(m->has(Backend::chart));  // flat chart data for the laplacian route

    // abelian: zero structure constants and drift
    REQUIRE(bool(m->structure));
    for (const auto& ck : m->structure->c) CHECK(ck.cwiseAbs().maxCoeff() == 0.0);
    CHECK(canonical_drift(*m->structure).norm() == 0.0);

    // translation moves by scaled coefficients
    Vec s = vec2(0.4, 1.1);
    Vec c = vec2(0.3, -0.5);
    Vec got = m->group_translate(s, c);
    Vec want = oracle::torus_group_translate(2.0, 1.0, Eigen::Vector2d(s), c);
    CHECK((got - want).norm() < 1e-14);

    // flat metric, vanishing christoffel symbols
    for (int trial = 0; trial < 10; ++trial) {
        Vec p = vec2(uniform(0, 2 * M_PI), uniform(0, 2 * M_PI));
        Mat g = m->metric(p);
        CHECK(g(0, 0) == 1.0);
        CHECK(g(1, 1) == 9.0);  // (R + r)^2
        CHECK(g(0, 1) == 0.0);
        auto cs = m->christoffel(p);
        for (int k = 0; k < 2; ++k) CHECK(cs.gamma[k].cwiseAbs().maxCoeff() == 0.0);
        CHECK(m->stratonovich_drift(p).norm() == 0.0);
    }
}
