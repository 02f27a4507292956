#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "rbm/montecarlo.hpp"

using namespace rbm;

namespace {
Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}
}  // namespace

TEST_CASE("every catalog manifold ships observables and probe points") {
    for (const auto& name : catalog_names()) {
        auto m = make_manifold(name);
        auto obs = default_observables(m);
        auto pts = default_probe_points(m);
        REQUIRE(obs.size() == 3);
        REQUIRE(pts.size() == 3);
        for (const auto& o : obs) {
            CHECK(!o.name.empty());
            REQUIRE(bool(o.f.value));
            REQUIRE(bool(o.f.gradient));  // analytic derivatives throughout
            REQUIRE(bool(o.f.hessian));
        }
        for (const auto& p : pts) {
            CHECK(p.size() == m->state_dim);
            CHECK(m->valid_state(p));
            // laplacian is finite at every probe for every observable
            for (const auto& o : obs) CHECK(std::isfinite(laplace_for(m, o.f, p)));
        }
    }
}

TEST_CASE("laplacian dispatch matches closed forms per backend") {
    // chart route: sphere, Delta cos(theta) = -2 cos(theta)
    auto s2 = make_manifold("sphere2-chart");
    ScalarField cos_theta{[](const Vec& p) { return std::cos(p(0)); },
                          [](const Vec& p) { return Vec(vec2(-std::sin(p(0)), 0.0)); },
                          [](const Vec& p) {
                              Mat h = Mat::Zero(2, 2);
                              h(0, 0) = -std::cos(p(0));
                              return h;
                          }};
    Vec p = vec2(1.1, 0.7);
    CHECK(std::abs(laplace_for(s2, cos_theta, p) - (-2.0 * std::cos(1.1))) < 1e-9);

    // embedded route: Delta z = -2 z on the unit sphere
    auto sph = make_manifold("sphere-n");
    ScalarField z{[](const Vec& x) { return x(2); },
                  [](const Vec&) {
                      Vec g = Vec::Zero(3);
                      g(2) = 1.0;
                      return g;
                  },
                  [](const Vec&) { return Mat(Mat::Zero(3, 3)); }};
    Vec x(3);
    x << std::sin(1.1) * std::cos(0.7), std::sin(1.1) * std::sin(0.7), std::cos(1.1);
    CHECK(std::abs(laplace_for(sph, z, x) - (-2.0 * std::cos(1.1))) < 1e-9);

    // the two routes agree on the same function at the same point
    CHECK(std::abs(laplace_for(s2, cos_theta, p) - laplace_for(sph, z, x)) < 1e-8);

    // group route: Delta log a = -2 on the affine line, Delta a = 0
    auto aff = make_manifold("aff-line");
    ScalarField log_a{[](const Vec& g) { return std::log(g(0)); },
                      [](const Vec& g) { return Vec(vec2(1.0 / g(0), 0.0)); },
                      [](const Vec& g) {
                          Mat h = Mat::Zero(2, 2);
                          h(0, 0) = -1.0 / (g(0) * g(0));
                          return h;
                      }};
    ScalarField a_coord{[](const Vec& g) { return g(0); },
                        [](const Vec&) { return Vec(vec2(1.0, 0.0)); },
                        [](const Vec&) { return Mat(Mat::Zero(2, 2)); }};
    Vec g0 = vec2(1.7, -0.4);
    CHECK(std::abs(laplace_for(aff, log_a, g0) - oracle::aff_laplace_log_a()) < 1e-6);
    CHECK(std::abs(laplace_for(aff, a_coord, g0)) < 1e-6);

    // flat torus group: Delta cos(theta) = -cos(theta) / r^2
    auto tg = make_manifold("torus2-group");
    CHECK(std::abs(laplace_for(tg, cos_theta, vec2(0.9, 2.0)) -
                   (-std::cos(0.9))) < 1e-6);

    // hyperbolic plane: Delta log y = -1
    auto hyp = make_manifold("hyperbolic-n");
    ScalarField log_y{[](const Vec& q) { return std::log(q(1)); },
                      [](const Vec& q) { return Vec(vec2(0.0, 1.0 / q(1))); },
                      [](const Vec& q) {
                          Mat h = Mat::Zero(2, 2);
                          h(1, 1) = -1.0 / (q(1) * q(1));
                          return h;
                      }};
    CHECK(std::abs(laplace_for(hyp, log_y, vec2(0.3, 1.4)) - (-1.0)) < 1e-9);

    // rotation group through the embedded route: Delta R_00 = -2 R_00
    auto so3 = make_manifold("so3");
    ScalarField r00{[](const Vec& x) { return x(0); },
                    [](const Vec&) {
                        Vec g = Vec::Zero(9);
                        g(0) = 1.0;
                        return g;
                    },
                    [](const Vec&) { return Mat(Mat::Zero(9, 9)); }};
    Eigen::Matrix3d R = oracle::rotation_exp(Eigen::Vector3d(0.4, -0.3, 0.8));
    Vec xr(9);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) xr(3 * i + j) = R(i, j);
    CHECK(std::abs(laplace_for(so3, r00, xr) - (-2.0 * R(0, 0))) < 1e-8);
}

TEST_CASE("generator estimate converges to half the laplacian") {
    // flat torus group: exponential stepping makes the increment exactly
    // gaussian, so the only error is statistical plus O(h) taylor bias
    auto tg = make_manifold("torus2-group");
    auto prob = make_brownian_problem(tg);
    ScalarField cos_theta{[](const Vec& p) { return std::cos(p(0)); },
                          [](const Vec& p) { return Vec(vec2(-std::sin(p(0)), 0.0)); },
                          [](const Vec& p) {
                              Mat h = Mat::Zero(2, 2);
                              h(0, 0) = -std::cos(p(0));
                              return h;
                          }};
    Vec p = vec2(1.0, 0.5);
    double target = 0.5 * laplace_for(tg, cos_theta, p);
    CHECK(std::abs(target - (-0.5 * std::cos(1.0))) < 1e-9);

    auto est = generator_estimate(prob, cos_theta, p, 2e-2, 20000, 555);
    CHECK(std::abs(est.target - target) < 1e-9);
    CHECK(est.se > 0);
    CHECK(est.se < 0.1);
    CHECK(std::abs(est.estimate - est.target) < 3.0 * est.se + 0.01);
}

TEST_CASE("verification registry lists the statistical checks") {
    auto names = verification_names();
    for (const char* want : {"so3-mean-decay", "sphere-eigen-decay",
                             "hyperbolic-log-drift", "torus-stationary",
                             "ito-strat-agreement", "generator-check", "frame-mixing"})
        CHECK(std::find(names.begin(), names.end(), want) != names.end());
    CHECK_THROWS_AS(run_verification("no-such-check"), UsageError);
}

TEST_CASE("rotation mean decay holds on a short run") {
    auto reports = run_verification("so3-mean-decay", [] {
        VerifyOptions o;
        o.paths = 1000;
        o.t_final = 0.3;
        return o;
    }());
    REQUIRE(reports.size() == 1);
    const auto& r = reports[0];
    CHECK(r.test == "so3-mean-decay");
    CHECK(!r.series.empty());
    CHECK(r.pass);
    CHECK(r.max_abs_deviation < 0.05);
    // the log follows log(3)/2 - t from the start
    CHECK(std::abs(r.series.front().target - 0.5 * std::log(3.0)) < 0.05);

    auto text = r.to_text();
    CHECK(text.find("schema_version") != std::string::npos);
    CHECK(text.find("so3-mean-decay") != std::string::npos);
    CHECK(text.find("pass") != std::string::npos);
}

TEST_CASE("sphere eigenfunction decay holds at reduced size") {
    auto reports = run_verification("sphere-eigen-decay", [] {
        VerifyOptions o;
        o.paths = 2000;
        return o;
    }());
    REQUIRE(reports.size() >= 1);
    for (const auto& r : reports) {
        CHECK(r.pass);
        for (const auto& s : r.series) {
            CHECK(s.tol > 0);
            CHECK(std::abs(s.estimate - s.target) <= s.tol);
        }
    }
}

TEST_CASE("hyperbolic log height drift and variance hold at reduced size") {
    auto reports = run_verification("hyperbolic-log-drift", [] {
        VerifyOptions o;
        o.paths = 2000;
        o.t_final = 0.25;
        return o;
    }());
    REQUIRE(!reports.empty());
    for (const auto& r : reports) {
        CHECK(r.pass);
        REQUIRE(r.series.size() >= 2);  // mean and variance rows
    }
}

TEST_CASE("ito and stratonovich ensembles agree on the torus chart") {
    VerifyOptions o;
    o.paths = 2000;
    o.dt = 2e-3;
    o.t_final = 0.2;
    auto r = ito_strat_agreement("torus2-chart", o.t_final, o.paths, o.seed, o.dt);
    CHECK(r.pass);
    REQUIRE(!r.series.empty());
    CHECK(r.series[0].tol > 0);
}

TEST_CASE("generator check passes on the cheap manifolds at reduced size") {
    for (const char* name : {"torus2-group", "aff-line"}) {
        auto r = generator_check(name, 2e-2, 20000, 999, 0.02);
        INFO(name);
        CHECK(r.pass);
        CHECK(r.series.size() == 9);  // three observables, three probes
    }
}

TEST_CASE("frame mixing leaves the ensemble law alone") {
    auto r = frame_mixing_agreement(321, 0.2, 2000, 2e-3);
    CHECK(r.pass);
    CHECK(!r.series.empty());
}

TEST_CASE("torus stationary report structure") {
    // far below the acceptance size: only the document structure is checked
    auto r = torus_stationary_test(2.0, 1.0, 60, 10.0, 18, 77, 5e-3, 0.2, false);
    CHECK(r.test == "torus-stationary");
    CHECK(!r.series.empty());
    CHECK(r.max_abs_deviation >= 0);
    auto text = r.to_text();
    CHECK(text.find("tv_distance") != std::string::npos);
}
