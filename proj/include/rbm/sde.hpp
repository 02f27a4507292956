// SDE assembly and integration. A problem realizes Brownian motion (or a
// converted variant) in the coordinates of its backend:
//
//   chart     state = chart coordinates, diffusion columns = frame fields.
//             Stratonovich drift is the intrinsic drift verbatim (Stratonovich
//             calculus is chart-covariant). Ito problems store the intrinsic
//             (covariant) drift; the Euler-Maruyama stepper realizes it in
//             coordinates as drift - 1/2 sum_i Gamma(sigma_i, sigma_i), which
//             is what makes the simulated generator equal X[f] + 1/2 sum
//             Hess f(sigma_i,sigma_i) rather than the flat-space expression.
//   embedded  state = ambient coordinates, diffusion columns = P(x) e_i/sqrt(w).
//             Drift fields are honest ambient fields (Ito drift = H/2), so the
//             steppers apply them verbatim; conversion uses flat derivatives
//             of the diffusion fields.
//   group     state = flattened matrix (or chart coordinates for the torus
//             group); the Stratonovich algebra drift is J/2 and the
//             exponential stepper applies g <- g exp(drift dt + sum e_i dW_i).
//             Ito integration runs Euler-Maruyama in ambient matrix
//             coordinates with the left-translation correction
//             g (mat(strat drift) + 1/2 sum e_i^2).
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rbm/manifold.hpp"
#include "rbm/noise.hpp"

namespace rbm {

enum class Formulation { ito, stratonovich };
enum class Scheme { euler_maruyama, heun, group_exponential };

std::string to_string(Formulation f);
std::string to_string(Scheme s);
Formulation formulation_from_string(const std::string& s);
Scheme scheme_from_string(const std::string& s);

struct SdeProblem {
    ManifoldPtr manifold;
    Backend backend = Backend::chart;
    Formulation formulation = Formulation::stratonovich;
    int state_dim = 0;
    int noise_dim = 0;

    // Realized fields over the state vector (see header comment for the
    // per-backend semantics of drift).
    std::function<Vec(const Vec&)> drift;
    std::function<Mat(const Vec&)> diffusion;  // columns sigma_1..sigma_m
    // chart backend only: Christoffel symbols for the covariant-Ito correction.
    std::function<ChristoffelSymbols(const Vec&)> christoffel;
    // group backend only: drift in algebra coefficients (stratonovich: J/2).
    Vec algebra_drift;
};

// Brownian-motion problem on the requested backend and formulation.
SdeProblem make_brownian_problem(const ManifoldPtr& m, Backend backend,
                                 Formulation formulation);
SdeProblem make_brownian_problem(const ManifoldPtr& m);  // default backend, strat

// Shifts the drift by -+ 1/2 sum_i nabla_{sigma_i} sigma_i (chart: Levi-Civita;
// embedded: flat ambient; group: algebra route, shift -J/2) and flips the
// formulation tag. Stratonovich -> Ito -> Stratonovich is the identity.
SdeProblem ito_strat_convert(const SdeProblem& p);

// Natural scheme: Ito -> Euler-Maruyama; Stratonovich -> Heun, or the group
// exponential on group backends.
Scheme default_scheme(const SdeProblem& p);

enum class DomainPolicy {
    error,   // a path leaving the validity domain fails with an error
    absorb,  // the path freezes at its last valid state (stopped process)
};

struct IntegratorConfig {
    Scheme scheme = Scheme::euler_maruyama;
    double dt = 1e-3;
    double t_final = 1.0;
    std::int64_t paths = 1;
    std::uint64_t seed = 0;
    std::int64_t thin = 0;  // store every thin-th step; 0 = auto (<= 1001 states)
    bool retraction = true;  // embedded backends; ignored where not applicable
    DomainPolicy domain_policy = DomainPolicy::error;
    int workers = 0;  // 0 = hardware concurrency; output is worker-invariant
    Vec start;        // empty = manifold default
};

struct Trajectory {
    std::int64_t path_id = 0;
    Mat states;     // stored rows x state_dim
    Vec residuals;  // constraint residual per stored row
    std::int64_t absorbed_step = -1;  // -1: never absorbed
    int refine_events = 0;            // positivity-retry activations
};

struct TrajectoryEnsemble {
    std::string manifold_name;
    Backend backend = Backend::chart;
    Formulation formulation = Formulation::stratonovich;
    IntegratorConfig config;  // echoed with start/thin/scheme resolved
    std::vector<std::int64_t> stored_steps;
    std::vector<Trajectory> trajectories;

    double time_of(std::size_t stored_index) const;
    std::int64_t absorbed_count() const;
    // Mean of f over paths at a stored index, with standard error.
    std::pair<double, double> mean_se(const std::function<double(const Vec&)>& f,
                                      std::size_t stored_index) const;
};

// Single integration step (exposed for tests). `step` is the global step
// index consumed by the noise counters.
Vec step_once(const SdeProblem& p, const IntegratorConfig& cfg, const Vec& state,
              std::int64_t step, const NoiseSource& noise, std::int64_t path_id);

Trajectory simulate_path(const SdeProblem& p, const IntegratorConfig& cfg,
                         std::int64_t path_id);

// Runs paths across workers; identical output for any worker count. Per-path
// failures are aggregated into an EnsembleError listing path indices.
TrajectoryEnsemble simulate_ensemble(const SdeProblem& p, const IntegratorConfig& cfg);

}  // namespace rbm
