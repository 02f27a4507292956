// Statistical verification that simulated processes have generator equal to
// half the Laplace-Beltrami operator: short-time generator estimates, closed
// form decay laws, stationary densities, and formulation/frame agreement
// checks. Every check returns a VerificationReport that serializes to a
// versioned structured-text document.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rbm/sde.hpp"

namespace rbm {

struct Observable {
    std::string name;
    ScalarField f;  // over the state vector of the manifold's default backend
};

// Three smooth observables per catalog manifold, with analytic derivatives.
std::vector<Observable> default_observables(const ManifoldPtr& m);
// Three probe points per catalog manifold, inside the validity domain.
std::vector<Vec> default_probe_points(const ManifoldPtr& m);

// Laplace-Beltrami of f at p through the manifold's default backend
// machinery (chart frame/Christoffel, embedded projection + mean curvature,
// or group exponential curves).
double laplace_for(const ManifoldPtr& m, const ScalarField& f, const Vec& p);

struct GeneratorEstimate {
    double estimate = 0;  // (E[f(x_h)] - f(p)) / h
    double se = 0;        // sd(f(x_h)) / (h sqrt(N))
    double target = 0;    // 1/2 Laplace-Beltrami f at p
};

GeneratorEstimate generator_estimate(const SdeProblem& p, const ScalarField& f,
                                     const Vec& point, double h, std::int64_t n_paths,
                                     std::uint64_t seed, int substeps = 2);

struct SeriesPoint {
    double t = 0;
    double estimate = 0;
    double target = 0;
    double se = 0;
    double tol = 0;  // allowed |estimate - target| at this point
};

struct VerificationReport {
    std::string test;
    std::vector<std::pair<std::string, std::string>> params;  // ordered echo
    std::uint64_t seed = 0;
    std::vector<SeriesPoint> series;
    double max_abs_deviation = 0;
    bool pass = false;
    std::vector<std::string> notes;

    std::string to_text() const;  // schema_version-headed structured text
};

// E[x_t] of the rotation ensemble contracts as sqrt(3) e^{-t}: checks
// max_t |log ||M_t||_F - (log(3)/2 - t)| <= tol on the stored grid.
VerificationReport so3_mean_decay(std::int64_t n_paths = 10000, double dt = 1e-3,
                                  double T = 2.0, std::uint64_t seed = 2024,
                                  double tol = 0.05);

// E[x_t . x_0] = exp(-n t / 2) on the embedded n-sphere at t in {1/4, 1/2, 1},
// within 3 SE + bias_allowance.
VerificationReport sphere_eigen_decay(int n, std::int64_t n_paths = 20000,
                                      double dt = 1e-3, std::uint64_t seed = 2024,
                                      double bias_allowance = 0.01);

// Upper half space: E[log x_n(t)] = -(n-1) t / 2 and Var[log x_n(t)] = t at
// t = T, each within 3 SE.
VerificationReport hyperbolic_log_drift(int n, std::int64_t n_paths = 20000,
                                        double dt = 1e-3, double T = 1.0,
                                        std::uint64_t seed = 2024);

// Total-variation distance between the pooled late-time theta histogram and
// the density proportional to R + r cos(theta). Samples are pooled over the
// stored grid restricted to t > T/2 across all paths.
VerificationReport torus_stationary_test(double R = 2.0, double r = 1.0,
                                         std::int64_t n_paths = 5000, double T = 200.0,
                                         int bins = 36, std::uint64_t seed = 2024,
                                         double dt = 2.5e-3, double tol = 0.02,
                                         bool drop_drift = false);

// |E_strat[f(x_T)] - E_ito[f(x_T)]| <= 3 sqrt(SE_s^2 + SE_i^2) + kappa dt for
// the manifold's agreement observable. Chart-singular manifolds run with the
// absorb policy; absorbed counts are reported.
VerificationReport ito_strat_agreement(const std::string& manifold, double T = 0.5,
                                       std::int64_t n_paths = 20000,
                                       std::uint64_t seed = 2024, double dt = 1e-3);

// Generator estimate vs half-Laplacian over default observables and probe
// points of one manifold; tolerance 3 SE + bias_allowance per cell.
VerificationReport generator_check(const std::string& manifold, double h = 1e-3,
                                   std::int64_t n_paths = 200000,
                                   std::uint64_t seed = 2024,
                                   double bias_allowance = 0.02);

// Ensemble law invariance under a fixed orthogonal mixing of the frame.
VerificationReport frame_mixing_agreement(std::uint64_t seed = 2024, double T = 0.5,
                                          std::int64_t n_paths = 20000,
                                          double dt = 1e-3);

// Registry for the CLI `verify` subcommand.
std::vector<std::string> verification_names();
struct VerifyOptions {
    std::int64_t paths = -1;  // -1: per-test default
    double dt = -1;
    double t_final = -1;
    std::uint64_t seed = 2024;
    double tol = -1;
};
std::vector<VerificationReport> run_verification(const std::string& name,
                                                 const VerifyOptions& opt = {});

}  // namespace rbm
