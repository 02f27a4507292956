#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <random>
#include <sstream>

#include "rbm/output.hpp"

using namespace rbm;

TEST_CASE("doubles format round-trip exact and locale-free") {
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-0.25) == "-0.25");
    CHECK(format_double(0.001) == "0.001");
    CHECK(format_double(0.1) == "0.10000000000000001");

    std::mt19937_64 gen(99);
    for (int i = 0; i < 2000; ++i) {
        double x;
        do {
            std::uint64_t bits = gen();
            std::memcpy(&x, &bits, sizeof x);
        } while (!std::isfinite(x));
        std::string s = format_double(x);
        CHECK(s.find(',') == std::string::npos);
        double back = std::strtod(s.c_str(), nullptr);
        CHECK(back == x);
    }
}

namespace {

TrajectoryEnsemble tiny_ensemble() {
    TrajectoryEnsemble e;
    e.manifold_name = "torus2-chart";
    e.backend = Backend::chart;
    e.formulation = Formulation::stratonovich;
    e.config.scheme = Scheme::heun;
    e.config.dt = 0.5;
    e.config.t_final = 1.0;
    e.config.paths = 2;
    e.config.seed = 7;
    e.config.thin = 1;
    e.config.workers = 1;
    e.stored_steps = {0, 1, 2};

    Trajectory t0;
    t0.path_id = 0;
    t0.states = Mat(3, 2);
    t0.states << 0, 0, 0.5, -0.25, 1, 0.125;
    t0.residuals = Vec::Zero(3);

    Trajectory t1;
    t1.path_id = 1;
    t1.states = Mat(3, 2);
    t1.states << 0, 0, -1, 2, 0.0625, 3;
    t1.residuals = Vec::Zero(3);
    t1.residuals(1) = 0.001;

    e.trajectories = {t0, t1};
    return e;
}

}  // namespace

TEST_CASE("trajectory csv bytes are frozen") {
    auto e = tiny_ensemble();
    std::string want =
        "path_id,step,time,state_0,state_1,residual\n"
        "0,0,0,0,0,0\n"
        "0,1,0.5,0.5,-0.25,0\n"
        "0,2,1,1,0.125,0\n"
        "1,0,0,0,0,0\n"
        "1,1,0.5,-1,2,0.001\n"
        "1,2,1,0.0625,3,0\n";
    CHECK(ensemble_csv(e) == want);

    std::ostringstream os;
    write_csv(os, e);
    CHECK(os.str() == want);
}

TEST_CASE("simulation summary is stable structured text") {
    auto e = tiny_ensemble();
    std::string want =
        "schema_version: 1\n"
        "kind: simulation_summary\n"
        "manifold: torus2-chart\n"
        "backend: chart\n"
        "formulation: stratonovich\n"
        "scheme: heun\n"
        "dt: 0.5\n"
        "t_final: 1\n"
        "paths: 2\n"
        "seed: 7\n"
        "workers: 1\n"
        "thin: 1\n"
        "stored_steps: 3\n"
        "state_dim: 2\n"
        "final_time: 1\n"
        "absorbed_paths: 0\n"
        "refine_events_total: 0\n"
        "csv: out.csv\n"
        "wall_seconds: 1.25\n";
    CHECK(simulation_summary(e, "out.csv", 1.25) == want);
}

TEST_CASE("enum to string round trips") {
    CHECK(to_string(Backend::chart) == "chart");
    CHECK(to_string(Backend::embedded) == "embedded");
    CHECK(to_string(Backend::group) == "group");
    CHECK(backend_from_string("group") == Backend::group);
    CHECK_THROWS_AS(backend_from_string("extrinsic"), UsageError);

    CHECK(to_string(Formulation::ito) == "ito");
    CHECK(to_string(Formulation::stratonovich) == "stratonovich");
    CHECK(formulation_from_string("ito") == Formulation::ito);
    CHECK_THROWS_AS(formulation_from_string("Ito"), UsageError);

    CHECK(to_string(Scheme::euler_maruyama) == "euler-maruyama");
    CHECK(to_string(Scheme::heun) == "heun");
    CHECK(to_string(Scheme::group_exponential) == "group-exponential");
    CHECK(scheme_from_string("euler-maruyama") == Scheme::euler_maruyama);
    CHECK(scheme_from_string("group-exponential") == Scheme::group_exponential);
    CHECK_THROWS_AS(scheme_from_string("milstein"), UsageError);
}
