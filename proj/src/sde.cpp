#include "rbm/sde.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <optional>
#include <thread>

namespace rbm {

std::string to_string(Formulation f) {
    return f == Formulation::ito ? "ito" : "stratonovich";
}

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::euler_maruyama: return "euler-maruyama";
        case Scheme::heun: return "heun";
        case Scheme::group_exponential: return "group-exponential";
    }
    throw Error("unreachable scheme tag");
}

Formulation formulation_from_string(const std::string& s) {
    if (s == "ito") return Formulation::ito;
    if (s == "stratonovich") return Formulation::stratonovich;
    throw UsageError("unknown formulation '" + s + "' (ito, stratonovich)");
}

Scheme scheme_from_string(const std::string& s) {
    if (s == "euler-maruyama") return Scheme::euler_maruyama;
    if (s == "heun") return Scheme::heun;
    if (s == "group-exponential") return Scheme::group_exponential;
    throw UsageError("unknown scheme '" + s +
                     "' (euler-maruyama, heun, group-exponential)");
}

namespace {

constexpr std::uint32_t kMaxRefineLevel = 26;

std::function<ChristoffelSymbols(const Vec&)> christoffel_field(const ManifoldPtr& m) {
    if (m->christoffel) return m->christoffel;
    MetricField metric = m->metric;
    return [metric](const Vec& x) { return christoffel_from_metric(metric, x); };
}

// group backend: sigma_i = d/dt translate(x, t e_i) at t = 0
Mat numeric_group_frame(const ManifoldPtr& m, const Vec& x) {
    int n = m->dim;
    Mat sig(m->state_dim, n);
    auto at = [&](const Vec& c) { return m->group_translate(x, c); };
    for (int i = 0; i < n; ++i)
        sig.col(i) = directional_derivative(at, Vec::Zero(n), Vec::Unit(n, i));
    return sig;
}

FrameField group_frame_field(const ManifoldPtr& m) {
    if (m->group_frame) return m->group_frame;
    return [m](const Vec& x) { return numeric_group_frame(m, x); };
}

// g (mat(J)/2 + 1/2 sum_i e_i^2) assembled from one-parameter subgroup curves
Vec numeric_group_ito_drift(const ManifoldPtr& m, const Vec& half_j, const Vec& x) {
    int n = m->dim;
    Vec d = numeric_group_frame(m, x) * half_j;
    double h = kFdStepSecond;
    Vec base = m->group_translate(x, Vec::Zero(n));
    for (int i = 0; i < n; ++i) {
        Vec fwd = m->group_translate(x, Vec(h * Vec::Unit(n, i)));
        Vec bwd = m->group_translate(x, Vec(-h * Vec::Unit(n, i)));
        d += 0.5 * (fwd - 2.0 * base + bwd) / (h * h);
    }
    return d;
}

void require_group_data(const ManifoldPtr& m) {
    if (!m->algebra || !m->structure || !m->group_translate)
        throw UsageError("manifold '" + m->name + "' has incomplete group data");
}

// proposals must stay finite and inside the chart box; embedded constraint
// drift is handled by the retraction, not rejected here
bool proposal_ok(const ManifoldPtr& m, const Vec& x) {
    if (!x.allFinite()) return false;
    if (m->chart_valid) return m->chart_valid(x);
    return true;
}

void check_scheme(const SdeProblem& p, Scheme scheme) {
    switch (scheme) {
        case Scheme::euler_maruyama:
            if (p.formulation != Formulation::ito)
                throw UsageError("euler-maruyama integrates ito problems only");
            return;
        case Scheme::heun:
            if (p.formulation != Formulation::stratonovich)
                throw UsageError("heun integrates stratonovich problems only");
            return;
        case Scheme::group_exponential:
            if (p.formulation != Formulation::stratonovich ||
                p.backend != Backend::group)
                throw UsageError(
                    "the group exponential integrates stratonovich group problems");
            return;
    }
    throw Error("unreachable scheme tag");
}

Vec draw_increments(const SdeProblem& p, const NoiseSource& noise,
                    std::int64_t path_id, std::int64_t step, std::uint32_t level,
                    std::uint32_t index, double dt) {
    Vec dw(p.noise_dim);
    double s = std::sqrt(dt);
    for (int i = 0; i < p.noise_dim; ++i)
        dw(i) = s * noise.normal(static_cast<std::uint64_t>(path_id),
                                 static_cast<std::uint64_t>(step),
                                 static_cast<std::uint32_t>(i), level, index);
    return dw;
}

// One proposal with the given sub-step counters; nullopt when the proposal
// (or the heun predictor) leaves the validity domain.
std::optional<Vec> attempt_step(const SdeProblem& p, const IntegratorConfig& cfg,
                                const Vec& x, std::int64_t step,
                                const NoiseSource& noise, std::int64_t path_id,
                                std::uint32_t level, std::uint32_t index, double dt) {
    const ManifoldPtr& m = p.manifold;
    Vec dw = draw_increments(p, noise, path_id, step, level, index, dt);
    Vec out;
    switch (cfg.scheme) {
        case Scheme::euler_maruyama: {
            Mat sigma = p.diffusion(x);
            Vec mu = p.drift(x);
            if (p.backend == Backend::chart) {
                // realize the covariant drift in coordinates
                ChristoffelSymbols gamma = p.christoffel(x);
                for (int i = 0; i < sigma.cols(); ++i)
                    mu -= 0.5 * gamma.contract(sigma.col(i), sigma.col(i));
            }
            out = x + mu * dt + sigma * dw;
            break;
        }
        case Scheme::heun: {
            Vec a0 = p.drift(x);
            Mat s0 = p.diffusion(x);
            Vec pred = x + a0 * dt + s0 * dw;
            if (!proposal_ok(m, pred)) return std::nullopt;
            Vec a1 = p.drift(pred);
            Mat s1 = p.diffusion(pred);
            out = x + 0.5 * (a0 + a1) * dt + 0.5 * (s0 + s1) * dw;
            break;
        }
        case Scheme::group_exponential: {
            Vec c = p.algebra_drift * dt + dw;
            out = m->group_translate(x, c);
            break;
        }
    }
    if (p.backend == Backend::embedded && cfg.retraction && m->retraction)
        out = m->retraction(out);
    if (!proposal_ok(m, out)) return std::nullopt;
    return out;
}

// Rejected proposals split into two half steps on fresh noise streams
// (positivity retry); each split bumps the refine counter.
std::optional<Vec> advance(const SdeProblem& p, const IntegratorConfig& cfg,
                           const Vec& x, std::int64_t step, const NoiseSource& noise,
                           std::int64_t path_id, std::uint32_t level,
                           std::uint32_t index, double dt, int& refines) {
    auto prop = attempt_step(p, cfg, x, step, noise, path_id, level, index, dt);
    if (prop) return prop;
    if (!p.manifold->positivity_retry || level >= kMaxRefineLevel)
        return std::nullopt;
    ++refines;
    auto first = advance(p, cfg, x, step, noise, path_id, level + 1, 2 * index,
                         0.5 * dt, refines);
    if (!first) return std::nullopt;
    return advance(p, cfg, *first, step, noise, path_id, level + 1, 2 * index + 1,
                   0.5 * dt, refines);
}

std::int64_t step_count(const IntegratorConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw UsageError("dt must be positive");
    if (cfg.t_final < 0.0) throw UsageError("t-final must be nonnegative");
    return std::llround(cfg.t_final / cfg.dt);
}

std::vector<std::int64_t> stored_grid(std::int64_t n_steps, std::int64_t thin) {
    std::vector<std::int64_t> grid;
    for (std::int64_t s = 0; s <= n_steps; s += thin) grid.push_back(s);
    if (grid.back() != n_steps) grid.push_back(n_steps);
    return grid;
}

std::int64_t resolve_thin(const IntegratorConfig& cfg, std::int64_t n_steps) {
    if (cfg.thin > 0) return cfg.thin;
    return std::max<std::int64_t>(1, (n_steps + 999) / 1000);
}

IntegratorConfig resolve_config(const SdeProblem& p, const IntegratorConfig& cfg) {
    IntegratorConfig r = cfg;
    if (r.start.size() == 0) r.start = p.manifold->default_start;
    r.thin = resolve_thin(cfg, step_count(cfg));
    if (r.workers <= 0) {
        unsigned hc = std::thread::hardware_concurrency();
        r.workers = hc > 0 ? static_cast<int>(hc) : 1;
    }
    return r;
}

}  // namespace

SdeProblem make_brownian_problem(const ManifoldPtr& m, Backend backend,
                                 Formulation formulation) {
    if (!m->has(backend))
        throw UsageError("manifold '" + m->name + "' has no " + to_string(backend) +
                         " backend");
    SdeProblem p;
    p.manifold = m;
    p.backend = backend;
    p.formulation = formulation;

    switch (backend) {
        case Backend::chart: {
            p.state_dim = m->dim;
            p.noise_dim = m->dim;
            if (!m->frame || !m->metric)
                throw UsageError("manifold '" + m->name + "' has incomplete chart data");
            p.diffusion = m->frame;
            p.christoffel = christoffel_field(m);
            if (formulation == Formulation::ito) {
                int n = m->dim;
                p.drift = [n](const Vec&) { return Vec(Vec::Zero(n)); };
            } else if (m->stratonovich_drift.value) {
                p.drift = m->stratonovich_drift.value;
            } else {
                FrameField frame = m->frame;
                auto gamma = p.christoffel;
                p.drift = [frame, gamma](const Vec& x) {
                    return frame_drift(frame, gamma(x), x);
                };
            }
            break;
        }
        case Backend::embedded: {
            p.state_dim = m->state_dim;
            p.noise_dim = m->state_dim;
            if (!m->projection)
                throw UsageError("manifold '" + m->name + "' has no projection field");
            ProjectionField proj = m->projection;
            double w = m->ambient_weight;
            p.diffusion = [proj, w](const Vec& x) { return pseudo_frame(proj, x, w); };
            std::function<Vec(const Vec&)> curv = m->mean_curvature;
            if (!curv)
                curv = [proj, w](const Vec& x) {
                    return mean_curvature_numeric(proj, x, w);
                };
            if (formulation == Formulation::ito) {
                p.drift = [curv](const Vec& x) { return Vec(0.5 * curv(x)); };
            } else {
                auto sigma = p.diffusion;
                int nd = p.noise_dim;
                p.drift = [curv, sigma, nd](const Vec& x) {
                    Vec d = 0.5 * curv(x);
                    Mat s = sigma(x);
                    for (int i = 0; i < nd; ++i) {
                        auto col = [&sigma, i](const Vec& y) {
                            return Vec(sigma(y).col(i));
                        };
                        d -= 0.5 * directional_derivative(col, x, s.col(i));
                    }
                    return d;
                };
            }
            break;
        }
        case Backend::group: {
            require_group_data(m);
            p.state_dim = m->state_dim;
            p.noise_dim = m->dim;
            Vec half_j = 0.5 * canonical_drift(*m->structure);
            p.algebra_drift = half_j;
            FrameField frame = group_frame_field(m);
            p.diffusion = frame;
            if (formulation == Formulation::ito) {
                if (m->group_ito_drift) {
                    p.drift = m->group_ito_drift;
                } else {
                    p.drift = [m, half_j](const Vec& x) {
                        return numeric_group_ito_drift(m, half_j, x);
                    };
                }
            } else {
                // left translation of the algebra drift into state coordinates
                p.drift = [frame, half_j](const Vec& x) {
                    return Vec(frame(x) * half_j);
                };
            }
            break;
        }
    }
    return p;
}

SdeProblem make_brownian_problem(const ManifoldPtr& m) {
    return make_brownian_problem(m, m->default_backend, Formulation::stratonovich);
}

SdeProblem ito_strat_convert(const SdeProblem& p) {
    if (p.backend == Backend::group) {
        // exact algebra route: rebuild on the closed forms
        return make_brownian_problem(p.manifold, p.backend,
                                     p.formulation == Formulation::ito
                                         ? Formulation::stratonovich
                                         : Formulation::ito);
    }
    SdeProblem q = p;
    q.formulation = p.formulation == Formulation::ito ? Formulation::stratonovich
                                                      : Formulation::ito;
    double sign = p.formulation == Formulation::stratonovich ? 1.0 : -1.0;
    auto sigma = p.diffusion;
    auto drift = p.drift;
    int nd = p.noise_dim;
    if (p.backend == Backend::chart) {
        auto gamma = p.christoffel;
        q.drift = [drift, sigma, gamma, nd, sign](const Vec& x) {
            Vec d = drift(x);
            Mat s = sigma(x);
            ChristoffelSymbols g = gamma(x);
            for (int i = 0; i < nd; ++i) {
                auto col = [&sigma, i](const Vec& y) { return Vec(sigma(y).col(i)); };
                VectorFieldFn field{col, nullptr};
                d += 0.5 * sign *
                     covariant_derivative_chart(g, field, s.col(i), x);
            }
            return d;
        };
    } else {
        q.drift = [drift, sigma, nd, sign](const Vec& x) {
            Vec d = drift(x);
            Mat s = sigma(x);
            for (int i = 0; i < nd; ++i) {
                auto col = [&sigma, i](const Vec& y) { return Vec(sigma(y).col(i)); };
                d += 0.5 * sign * directional_derivative(col, x, s.col(i));
            }
            return d;
        };
    }
    return q;
}

Scheme default_scheme(const SdeProblem& p) {
    if (p.formulation == Formulation::ito) return Scheme::euler_maruyama;
    return p.backend == Backend::group ? Scheme::group_exponential : Scheme::heun;
}

double TrajectoryEnsemble::time_of(std::size_t stored_index) const {
    return config.dt * static_cast<double>(stored_steps.at(stored_index));
}

std::int64_t TrajectoryEnsemble::absorbed_count() const {
    std::int64_t n = 0;
    for (const auto& t : trajectories) n += t.absorbed_step >= 0 ? 1 : 0;
    return n;
}

std::pair<double, double> TrajectoryEnsemble::mean_se(
    const std::function<double(const Vec&)>& f, std::size_t stored_index) const {
    std::size_t n = trajectories.size();
    if (n == 0) throw UsageError("empty ensemble");
    double sum = 0.0;
    std::vector<double> vals(n);
    for (std::size_t i = 0; i < n; ++i) {
        vals[i] = f(Vec(trajectories[i].states.row(stored_index).transpose()));
        sum += vals[i];
    }
    double mean = sum / double(n);
    if (n < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double v : vals) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / double(n - 1) / double(n))};
}

Vec step_once(const SdeProblem& p, const IntegratorConfig& cfg, const Vec& state,
              std::int64_t step, const NoiseSource& noise, std::int64_t path_id) {
    check_scheme(p, cfg.scheme);
    auto out = attempt_step(p, cfg, state, step, noise, path_id, 0, 0, cfg.dt);
    if (!out)
        throw DomainError("step " + std::to_string(step) +
                          " left the validity domain");
    return *out;
}

Trajectory simulate_path(const SdeProblem& p, const IntegratorConfig& cfg,
                         std::int64_t path_id) {
    check_scheme(p, cfg.scheme);
    const ManifoldPtr& m = p.manifold;
    Vec x = cfg.start.size() > 0 ? cfg.start : m->default_start;
    if (!m->valid_state(x))
        throw DomainError("start state is not on '" + m->name + "'");

    std::int64_t n_steps = step_count(cfg);
    auto grid = stored_grid(n_steps, resolve_thin(cfg, n_steps));
    NoiseSource noise{cfg.seed};

    Trajectory tr;
    tr.path_id = path_id;
    tr.states = Mat(static_cast<int>(grid.size()), p.state_dim);
    tr.residuals = Vec(static_cast<int>(grid.size()));

    std::size_t gi = 0;
    bool absorbed = false;
    for (std::int64_t s = 0; s <= n_steps; ++s) {
        if (gi < grid.size() && grid[gi] == s) {
            tr.states.row(gi) = x.transpose();
            tr.residuals(gi) = m->residual(x);
            ++gi;
        }
        if (s == n_steps || absorbed) continue;
        auto next = advance(p, cfg, x, s, noise, path_id, 0, 0, cfg.dt,
                            tr.refine_events);
        if (next) {
            x = *next;
        } else if (cfg.domain_policy == DomainPolicy::absorb) {
            absorbed = true;
            tr.absorbed_step = s;
        } else {
            throw DomainError("path " + std::to_string(path_id) +
                              " left the validity domain of '" + m->name +
                              "' at step " + std::to_string(s));
        }
    }
    return tr;
}

TrajectoryEnsemble simulate_ensemble(const SdeProblem& p,
                                     const IntegratorConfig& cfg) {
    check_scheme(p, cfg.scheme);
    if (cfg.paths < 1) throw UsageError("need at least one path");
    IntegratorConfig rc = resolve_config(p, cfg);
    if (!p.manifold->valid_state(rc.start))
        throw DomainError("start state is not on '" + p.manifold->name + "'");

    std::int64_t n_steps = step_count(rc);
    TrajectoryEnsemble e;
    e.manifold_name = p.manifold->name;
    e.backend = p.backend;
    e.formulation = p.formulation;
    e.config = rc;
    e.stored_steps = stored_grid(n_steps, rc.thin);
    e.trajectories.resize(static_cast<std::size_t>(rc.paths));

    int workers = static_cast<int>(
        std::min<std::int64_t>(rc.workers, rc.paths));
    std::mutex fail_mutex;
    std::vector<std::pair<std::int64_t, std::string>> failures;

    auto run_block = [&](int w) {
        for (std::int64_t id = w; id < rc.paths; id += workers) {
            try {
                e.trajectories[static_cast<std::size_t>(id)] =
                    simulate_path(p, rc, id);
            } catch (const DomainError& err) {
                std::lock_guard<std::mutex> lock(fail_mutex);
                failures.emplace_back(id, err.what());
            }
        }
    };
    if (workers <= 1) {
        run_block(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(run_block, w);
        for (auto& t : pool) t.join();
    }

    if (!failures.empty()) {
        std::sort(failures.begin(), failures.end());
        throw EnsembleError(std::to_string(failures.size()) + " of " +
                                std::to_string(rc.paths) + " paths failed",
                            std::move(failures));
    }
    return e;
}

}  // namespace rbm
