#include "rbm/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "rbm/output.hpp"

namespace rbm {

namespace {

Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

ScalarField linear_coordinate(int dim, int index) {
    return ScalarField{[index](const Vec& x) { return x(index); },
                       [dim, index](const Vec&) { return Vec(Vec::Unit(dim, index)); },
                       [dim](const Vec&) { return Mat(Mat::Zero(dim, dim)); }};
}

// cos(x_i) with flat analytic derivatives
ScalarField cosine_coordinate(int dim, int index) {
    return ScalarField{
        [index](const Vec& x) { return std::cos(x(index)); },
        [dim, index](const Vec& x) {
            Vec g = Vec::Zero(dim);
            g(index) = -std::sin(x(index));
            return g;
        },
        [dim, index](const Vec& x) {
            Mat h = Mat::Zero(dim, dim);
            h(index, index) = -std::cos(x(index));
            return h;
        }};
}

ScalarField squared_coordinate(int dim, int index) {
    return ScalarField{[index](const Vec& x) { return x(index) * x(index); },
                       [dim, index](const Vec& x) {
                           Vec g = Vec::Zero(dim);
                           g(index) = 2.0 * x(index);
                           return g;
                       },
                       [dim, index](const Vec&) {
                           Mat h = Mat::Zero(dim, dim);
                           h(index, index) = 2.0;
                           return h;
                       }};
}

ScalarField log_coordinate(int dim, int index) {
    return ScalarField{[index](const Vec& x) { return std::log(x(index)); },
                       [dim, index](const Vec& x) {
                           Vec g = Vec::Zero(dim);
                           g(index) = 1.0 / x(index);
                           return g;
                       },
                       [dim, index](const Vec& x) {
                           Mat h = Mat::Zero(dim, dim);
                           h(index, index) = -1.0 / (x(index) * x(index));
                           return h;
                       }};
}

// sin(x_0) * trig(x_1) products for the 2d angle charts
ScalarField sin_cos_product() {
    return ScalarField{
        [](const Vec& p) { return std::sin(p(0)) * std::cos(p(1)); },
        [](const Vec& p) {
            return Vec(vec2(std::cos(p(0)) * std::cos(p(1)),
                            -std::sin(p(0)) * std::sin(p(1))));
        },
        [](const Vec& p) {
            Mat h(2, 2);
            h(0, 0) = -std::sin(p(0)) * std::cos(p(1));
            h(0, 1) = h(1, 0) = -std::cos(p(0)) * std::sin(p(1));
            h(1, 1) = -std::sin(p(0)) * std::cos(p(1));
            return h;
        }};
}

ScalarField sin_sin_product() {
    return ScalarField{
        [](const Vec& p) { return std::sin(p(0)) * std::sin(p(1)); },
        [](const Vec& p) {
            return Vec(vec2(std::cos(p(0)) * std::sin(p(1)),
                            std::sin(p(0)) * std::cos(p(1))));
        },
        [](const Vec& p) {
            Mat h(2, 2);
            h(0, 0) = -std::sin(p(0)) * std::sin(p(1));
            h(0, 1) = h(1, 0) = std::cos(p(0)) * std::cos(p(1));
            h(1, 1) = -std::sin(p(0)) * std::sin(p(1));
            return h;
        }};
}

ScalarField cos2_theta() {
    return ScalarField{[](const Vec& p) {
                           double c = std::cos(p(0));
                           return c * c;
                       },
                       [](const Vec& p) {
                           return Vec(vec2(-std::sin(2.0 * p(0)), 0.0));
                       },
                       [](const Vec& p) {
                           Mat h = Mat::Zero(2, 2);
                           h(0, 0) = -2.0 * std::cos(2.0 * p(0));
                           return h;
                       }};
}

Mat group_frame_at(const ManifoldPtr& m, const Vec& p) {
    if (m->group_frame) return m->group_frame(p);
    int n = m->dim;
    Mat sig(m->state_dim, n);
    auto at = [&](const Vec& c) { return m->group_translate(p, c); };
    for (int i = 0; i < n; ++i)
        sig.col(i) = directional_derivative(at, Vec::Zero(n), Vec::Unit(n, i));
    return sig;
}

double sample_se(const std::vector<double>& vals, double mean) {
    std::size_t n = vals.size();
    if (n < 2) return 0.0;
    double ss = 0.0;
    for (double v : vals) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / double(n - 1) / double(n));
}

}  // namespace

std::vector<Observable> default_observables(const ManifoldPtr& m) {
    const std::string& n = m->name;
    if (n == "sphere2-chart")
        return {{"cos-theta", cosine_coordinate(2, 0)},
                {"sin-theta-cos-phi", sin_cos_product()},
                {"cos2-theta", cos2_theta()}};
    if (n == "torus2-chart" || n == "torus2-group")
        return {{"cos-theta", cosine_coordinate(2, 0)},
                {"cos-phi", cosine_coordinate(2, 1)},
                {"sin-theta-sin-phi", sin_sin_product()}};
    if (n == "hyperbolic-n") {
        int d = m->dim;
        return {{"log-height", log_coordinate(d, d - 1)},
                {"height", linear_coordinate(d, d - 1)},
                {"cos-first", cosine_coordinate(d, 0)}};
    }
    if (n == "sphere-n") {
        int d = m->state_dim;
        return {{"last-coordinate", linear_coordinate(d, d - 1)},
                {"first-coordinate", linear_coordinate(d, 0)},
                {"last-squared", squared_coordinate(d, d - 1)}};
    }
    if (n == "so3")
        return {{"entry-00", linear_coordinate(9, 0)},
                {"trace",
                 ScalarField{[](const Vec& x) { return x(0) + x(4) + x(8); },
                             [](const Vec&) {
                                 Vec g = Vec::Zero(9);
                                 g(0) = g(4) = g(8) = 1.0;
                                 return g;
                             },
                             [](const Vec&) { return Mat(Mat::Zero(9, 9)); }}},
                {"entry-01", linear_coordinate(9, 1)}};
    if (n == "aff-line")
        return {{"log-scale", log_coordinate(2, 0)},
                {"scale", linear_coordinate(2, 0)},
                {"offset", linear_coordinate(2, 1)}};
    throw UsageError("no observables registered for manifold '" + n + "'");
}

std::vector<Vec> default_probe_points(const ManifoldPtr& m) {
    const std::string& n = m->name;
    if (n == "sphere2-chart")
        return {vec2(1.1, 0.7), vec2(M_PI / 2, 0.0), vec2(2.0, -1.3)};
    if (n == "torus2-chart" || n == "torus2-group")
        return {vec2(1.0, 0.5), vec2(-0.6, 2.2), vec2(3.0, -1.0)};
    if (n == "hyperbolic-n") {
        int d = m->dim;
        Vec a = Vec::Zero(d);
        a(d - 1) = 1.0;
        Vec b = Vec::Zero(d);
        b(0) = 0.3;
        b(d - 1) = 1.4;
        Vec c = Vec::Zero(d);
        c(0) = -0.2;
        c(d - 1) = 0.6;
        return {a, b, c};
    }
    if (n == "sphere-n") {
        int d = m->state_dim;
        Vec ones = Vec::Ones(d);
        Vec ramp(d);
        for (int i = 0; i < d; ++i) ramp(i) = double(i + 1);
        return {m->default_start, Vec(ones / ones.norm()), Vec(ramp / ramp.norm())};
    }
    if (n == "so3")
        return {flatten(Mat(Eigen::Matrix3d::Identity())),
                flatten(Mat(rodrigues_exp(Eigen::Vector3d(0.4, -0.3, 0.8)))),
                flatten(Mat(rodrigues_exp(Eigen::Vector3d(-1.1, 0.2, 0.5))))};
    if (n == "aff-line")
        return {vec2(1.0, 0.0), vec2(1.7, -0.4), vec2(0.5, 2.0)};
    throw UsageError("no probe points registered for manifold '" + n + "'");
}

double laplace_for(const ManifoldPtr& m, const ScalarField& f, const Vec& p) {
    switch (m->default_backend) {
        case Backend::chart: {
            ChristoffelSymbols gamma =
                m->christoffel ? m->christoffel(p)
                               : christoffel_from_metric(m->metric, p);
            return laplace_beltrami(f, m->frame, gamma, p);
        }
        case Backend::embedded: {
            Vec H = m->mean_curvature
                        ? m->mean_curvature(p)
                        : mean_curvature_numeric(m->projection, p, m->ambient_weight);
            return laplace_beltrami_embedded(f, m->projection, H, p,
                                             m->ambient_weight);
        }
        case Backend::group: {
            // sum of second derivatives along the exponential curves plus the
            // first-order trace term grad f . (g J)
            int n = m->dim;
            Vec grad = scalar_gradient(f, p);
            Mat hess = scalar_hessian(f, p);
            Mat sig = group_frame_at(m, p);
            Vec J = canonical_drift(*m->structure);
            double out = grad.dot(sig * J);
            double h = kFdStepSecond;
            Vec base = m->group_translate(p, Vec::Zero(n));
            for (int i = 0; i < n; ++i) {
                Vec s = sig.col(i);
                out += s.dot(hess * s);
                Vec fwd = m->group_translate(p, Vec(h * Vec::Unit(n, i)));
                Vec bwd = m->group_translate(p, Vec(-h * Vec::Unit(n, i)));
                out += grad.dot((fwd - 2.0 * base + bwd) / (h * h));
            }
            return out;
        }
    }
    throw Error("unreachable backend tag");
}

GeneratorEstimate generator_estimate(const SdeProblem& p, const ScalarField& f,
                                     const Vec& point, double h, std::int64_t n_paths,
                                     std::uint64_t seed, int substeps) {
    if (substeps < 1) throw UsageError("substeps must be positive");
    IntegratorConfig cfg;
    cfg.scheme = default_scheme(p);
    cfg.dt = h / substeps;
    cfg.t_final = h;
    cfg.paths = n_paths;
    cfg.seed = seed;
    cfg.thin = substeps;
    cfg.start = point;

    auto e = simulate_ensemble(p, cfg);
    std::size_t last = e.stored_steps.size() - 1;
    auto [mean, se] = e.mean_se(f.value, last);

    GeneratorEstimate out;
    out.estimate = (mean - f.value(point)) / h;
    out.se = se / h;
    out.target = 0.5 * laplace_for(p.manifold, f, point);
    return out;
}

std::string VerificationReport::to_text() const {
    std::string out;
    out += "schema_version: 1\n";
    out += "kind: verification_report\n";
    out += "test: " + test + "\n";
    out += "seed: " + std::to_string(seed) + "\n";
    for (const auto& [k, v] : params) out += k + ": " + v + "\n";
    out += "series_columns: t,estimate,target,se,tol\n";
    for (const auto& s : series)
        out += "series: " + format_double(s.t) + "," + format_double(s.estimate) +
               "," + format_double(s.target) + "," + format_double(s.se) + "," +
               format_double(s.tol) + "\n";
    out += "max_abs_deviation: " + format_double(max_abs_deviation) + "\n";
    out += std::string("pass: ") + (pass ? "true" : "false") + "\n";
    for (const auto& n : notes) out += "note: " + n + "\n";
    return out;
}

VerificationReport so3_mean_decay(std::int64_t n_paths, double dt, double T,
                                  std::uint64_t seed, double tol) {
    auto m = make_so3();
    auto p = make_brownian_problem(m, Backend::group, Formulation::stratonovich);
    IntegratorConfig cfg;
    cfg.scheme = Scheme::group_exponential;
    cfg.dt = dt;
    cfg.t_final = T;
    cfg.paths = n_paths;
    cfg.seed = seed;
    std::int64_t n_steps = std::llround(T / dt);
    cfg.thin = std::max<std::int64_t>(1, n_steps / 40);

    auto e = simulate_ensemble(p, cfg);
    VerificationReport r;
    r.test = "so3-mean-decay";
    r.seed = seed;
    r.params = {{"paths", std::to_string(n_paths)},
                {"dt", format_double(dt)},
                {"t_final", format_double(T)},
                {"tol", format_double(tol)}};

    double log3_half = 0.5 * std::log(3.0);
    for (std::size_t k = 0; k < e.stored_steps.size(); ++k) {
        Vec mean = Vec::Zero(9);
        for (const auto& tr : e.trajectories)
            mean += tr.states.row(static_cast<int>(k)).transpose();
        mean /= double(e.trajectories.size());
        double t = e.time_of(k);
        SeriesPoint s;
        s.t = t;
        s.estimate = std::log(mean.norm());
        s.target = log3_half - t;
        s.se = 0.0;
        s.tol = tol;
        r.series.push_back(s);
        r.max_abs_deviation =
            std::max(r.max_abs_deviation, std::abs(s.estimate - s.target));
    }
    r.pass = r.max_abs_deviation <= tol;
    return r;
}

VerificationReport sphere_eigen_decay(int n, std::int64_t n_paths, double dt,
                                      std::uint64_t seed, double bias_allowance) {
    auto m = make_sphere_embedded(n);
    auto p = make_brownian_problem(m, Backend::embedded, Formulation::ito);
    IntegratorConfig cfg;
    cfg.scheme = Scheme::euler_maruyama;
    cfg.dt = dt;
    cfg.t_final = 1.0;
    cfg.paths = n_paths;
    cfg.seed = seed;
    std::int64_t n_steps = std::llround(cfg.t_final / dt);
    cfg.thin = std::max<std::int64_t>(1, n_steps / 4);

    auto e = simulate_ensemble(p, cfg);
    Vec x0 = m->default_start;
    auto align = [&x0](const Vec& x) { return x.dot(x0); };

    VerificationReport r;
    r.test = "sphere-eigen-decay";
    r.seed = seed;
    r.params = {{"n", std::to_string(n)},
                {"paths", std::to_string(n_paths)},
                {"dt", format_double(dt)},
                {"bias_allowance", format_double(bias_allowance)}};

    r.pass = true;
    for (double tau : {0.25, 0.5, 1.0}) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < e.stored_steps.size(); ++k)
            if (std::abs(e.time_of(k) - tau) < std::abs(e.time_of(best) - tau))
                best = k;
        auto [mean, se] = e.mean_se(align, best);
        SeriesPoint s;
        s.t = e.time_of(best);
        s.estimate = mean;
        s.target = std::exp(-0.5 * n * s.t);
        s.se = se;
        s.tol = 3.0 * se + bias_allowance;
        r.series.push_back(s);
        double dev = std::abs(s.estimate - s.target);
        r.max_abs_deviation = std::max(r.max_abs_deviation, dev);
        if (dev > s.tol) r.pass = false;
    }
    return r;
}

VerificationReport hyperbolic_log_drift(int n, std::int64_t n_paths, double dt,
                                        double T, std::uint64_t seed) {
    auto m = make_hyperbolic(n);
    auto p = make_brownian_problem(m, Backend::chart, Formulation::ito);
    IntegratorConfig cfg;
    cfg.scheme = Scheme::euler_maruyama;
    cfg.dt = dt;
    cfg.t_final = T;
    cfg.paths = n_paths;
    cfg.seed = seed;
    cfg.thin = std::llround(T / dt);

    auto e = simulate_ensemble(p, cfg);
    std::vector<double> vals;
    vals.reserve(e.trajectories.size());
    for (const auto& tr : e.trajectories)
        vals.push_back(std::log(tr.states(tr.states.rows() - 1, n - 1)));

    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= double(vals.size());
    double se_mean = sample_se(vals, mean);

    double s2 = 0.0, m4 = 0.0;
    for (double v : vals) {
        double d = v - mean;
        s2 += d * d;
        m4 += d * d * d * d;
    }
    s2 /= double(vals.size() - 1);
    m4 /= double(vals.size());
    double se_var = std::sqrt(std::max(0.0, m4 - s2 * s2) / double(vals.size()));

    VerificationReport r;
    r.test = "hyperbolic-log-drift";
    r.seed = seed;
    r.params = {{"n", std::to_string(n)},
                {"paths", std::to_string(n_paths)},
                {"dt", format_double(dt)},
                {"t_final", format_double(T)}};

    SeriesPoint sm;
    sm.t = T;
    sm.estimate = mean;
    sm.target = -0.5 * (n - 1) * T;
    sm.se = se_mean;
    sm.tol = 3.0 * se_mean;
    r.series.push_back(sm);

    SeriesPoint sv;
    sv.t = T;
    sv.estimate = s2;
    sv.target = T;
    sv.se = se_var;
    sv.tol = 3.0 * se_var;
    r.series.push_back(sv);

    r.max_abs_deviation = std::max(std::abs(sm.estimate - sm.target),
                                   std::abs(sv.estimate - sv.target));
    r.pass = std::abs(sm.estimate - sm.target) <= sm.tol &&
             std::abs(sv.estimate - sv.target) <= sv.tol;
    r.notes.push_back("log-height mean and variance at the final time");
    return r;
}

VerificationReport torus_stationary_test(double R, double r, std::int64_t n_paths,
                                         double T, int bins, std::uint64_t seed,
                                         double dt, double tol, bool drop_drift) {
    if (bins < 2) throw UsageError("need at least two bins");
    auto m = make_torus2_chart(R, r);
    auto p = make_brownian_problem(m, Backend::chart, Formulation::stratonovich);
    if (drop_drift) {
        // negative control: without the intrinsic drift the chain settles on
        // the uniform angle law instead of the area density
        p.drift = [](const Vec&) { return Vec(Vec::Zero(2)); };
    }
    IntegratorConfig cfg;
    cfg.scheme = Scheme::heun;
    cfg.dt = dt;
    cfg.t_final = T;
    cfg.paths = n_paths;
    cfg.seed = seed;
    std::int64_t n_steps = std::llround(T / dt);
    cfg.thin = std::max<std::int64_t>(1, n_steps / 400);

    auto e = simulate_ensemble(p, cfg);

    double two_pi = 2.0 * M_PI;
    std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
    std::int64_t total = 0;
    for (std::size_t k = 0; k < e.stored_steps.size(); ++k) {
        if (e.time_of(k) <= 0.5 * T) continue;
        for (const auto& tr : e.trajectories) {
            double theta = tr.states(static_cast<int>(k), 0);
            double u = theta - two_pi * std::floor(theta / two_pi);
            int b = std::min(bins - 1, static_cast<int>(u / two_pi * bins));
            counts[static_cast<std::size_t>(b)] += 1.0;
            ++total;
        }
    }
    if (total == 0) throw UsageError("no samples past T/2; increase T or storage");

    VerificationReport rep;
    rep.test = "torus-stationary";
    rep.seed = seed;
    rep.params = {{"R", format_double(R)},        {"r", format_double(r)},
                  {"paths", std::to_string(n_paths)}, {"t_final", format_double(T)},
                  {"dt", format_double(dt)},      {"bins", std::to_string(bins)},
                  {"drop_drift", drop_drift ? "true" : "false"}};

    double tv = 0.0;
    for (int b = 0; b < bins; ++b) {
        double a0 = two_pi * b / bins, a1 = two_pi * (b + 1) / bins;
        double target =
            (R * (a1 - a0) + r * (std::sin(a1) - std::sin(a0))) / (two_pi * R);
        double est = counts[static_cast<std::size_t>(b)] / double(total);
        tv += 0.5 * std::abs(est - target);
        SeriesPoint s;
        s.t = 0.5 * (a0 + a1);  // bin center angle
        s.estimate = est;
        s.target = target;
        s.se = 0.0;
        s.tol = tol;
        rep.series.push_back(s);
    }
    rep.max_abs_deviation = tv;
    rep.pass = tv <= tol;
    rep.notes.push_back("tv_distance: " + format_double(tv));
    rep.notes.push_back("pooled_samples: " + std::to_string(total));
    return rep;
}

namespace {

// Weak-error gap coefficients for the scheme pair: |mean gap| / dt measured
// on common-seed ensembles at dt in [2e-3, 2e-2] (N=1e4, T=0.5), pinned at
// roughly twice the worst measured slope. torus2-group steps are identical
// under both formulations (gap is exactly 0). sphere2-chart's slope sits
// below its absorption-censoring floor (~3e-4, decaying with dt), so its pin
// is sized to dominate the floor instead.
double agreement_kappa(const std::string& name) {
    static const std::map<std::string, double> k = {
        {"sphere2-chart", 0.5}, {"torus2-chart", 0.1}, {"torus2-group", 0.05},
        {"hyperbolic-n", 2.0},  {"sphere-n", 1.5},     {"so3", 1.2},
        {"aff-line", 3.5}};
    auto it = k.find(name);
    return it == k.end() ? 2.0 : it->second;
}

ScalarField agreement_observable(const ManifoldPtr& m) {
    const std::string& n = m->name;
    if (n == "sphere2-chart" || n == "torus2-chart" || n == "torus2-group")
        return cosine_coordinate(2, 0);
    if (n == "hyperbolic-n") return log_coordinate(m->dim, m->dim - 1);
    if (n == "sphere-n") return linear_coordinate(m->state_dim, m->state_dim - 1);
    if (n == "so3")
        return ScalarField{[](const Vec& x) { return x(0) + x(4) + x(8); }, nullptr,
                           nullptr};
    if (n == "aff-line") return log_coordinate(2, 0);
    throw UsageError("no agreement observable for manifold '" + n + "'");
}

}  // namespace

VerificationReport ito_strat_agreement(const std::string& manifold, double T,
                                       std::int64_t n_paths, std::uint64_t seed,
                                       double dt) {
    auto m = make_manifold(manifold);
    Backend backend = m->has(Backend::group) ? Backend::group : m->default_backend;
    auto p_i = make_brownian_problem(m, backend, Formulation::ito);
    auto p_s = make_brownian_problem(m, backend, Formulation::stratonovich);

    IntegratorConfig cfg;
    cfg.dt = dt;
    cfg.t_final = T;
    cfg.paths = n_paths;
    cfg.seed = seed;
    cfg.thin = std::llround(T / dt);
    // chart boxes without the refinement fallback absorb at the singular rim
    if (m->chart_valid && !m->positivity_retry)
        cfg.domain_policy = DomainPolicy::absorb;

    cfg.scheme = default_scheme(p_i);
    auto e_i = simulate_ensemble(p_i, cfg);
    cfg.scheme = default_scheme(p_s);
    auto e_s = simulate_ensemble(p_s, cfg);

    ScalarField f = agreement_observable(m);
    std::size_t last = e_i.stored_steps.size() - 1;
    auto [mean_i, se_i] = e_i.mean_se(f.value, last);
    auto [mean_s, se_s] = e_s.mean_se(f.value, last);

    double kappa = agreement_kappa(m->name);
    double combined = std::sqrt(se_i * se_i + se_s * se_s);

    VerificationReport r;
    r.test = "ito-strat-agreement";
    r.seed = seed;
    r.params = {{"manifold", m->name},
                {"backend", to_string(backend)},
                {"paths", std::to_string(n_paths)},
                {"dt", format_double(dt)},
                {"t_final", format_double(T)},
                {"kappa", format_double(kappa)}};

    SeriesPoint s;
    s.t = T;
    s.estimate = mean_s;
    s.target = mean_i;
    s.se = combined;
    s.tol = 3.0 * combined + kappa * dt;
    r.series.push_back(s);
    r.max_abs_deviation = std::abs(mean_s - mean_i);
    r.pass = r.max_abs_deviation <= s.tol;
    if (e_i.absorbed_count() + e_s.absorbed_count() > 0)
        r.notes.push_back(
            "absorbed paths: ito " + std::to_string(e_i.absorbed_count()) +
            ", stratonovich " + std::to_string(e_s.absorbed_count()));
    return r;
}

VerificationReport generator_check(const std::string& manifold, double h,
                                   std::int64_t n_paths, std::uint64_t seed,
                                   double bias_allowance) {
    auto m = make_manifold(manifold);
    auto p = make_brownian_problem(m, m->default_backend, Formulation::ito);
    auto obs = default_observables(m);
    auto pts = default_probe_points(m);

    VerificationReport r;
    r.test = "generator-check";
    r.seed = seed;
    r.params = {{"manifold", m->name},
                {"backend", to_string(m->default_backend)},
                {"h", format_double(h)},
                {"paths", std::to_string(n_paths)},
                {"bias_allowance", format_double(bias_allowance)}};

    r.pass = true;
    int cell = 0;
    for (const auto& o : obs)
        for (const auto& pt : pts) {
            auto est = generator_estimate(p, o.f, pt, h, n_paths, seed + cell);
            ++cell;
            SeriesPoint s;
            s.t = h;
            s.estimate = est.estimate;
            s.target = est.target;
            s.se = est.se;
            s.tol = 3.0 * est.se + bias_allowance;
            r.series.push_back(s);
            double dev = std::abs(est.estimate - est.target);
            r.max_abs_deviation = std::max(r.max_abs_deviation, dev);
            if (dev > s.tol) r.pass = false;
        }
    r.notes.push_back("cells: observables x probe points");
    return r;
}

VerificationReport frame_mixing_agreement(std::uint64_t seed, double T,
                                          std::int64_t n_paths, double dt) {
    auto m = make_torus2_chart();
    auto a = make_brownian_problem(m, Backend::chart, Formulation::stratonovich);

    // fixed orthogonal mix with a reflection; the intrinsic drift is invariant
    double c = std::cos(0.7), s = std::sin(0.7);
    Mat Q(2, 2);
    Q << c, s, s, -c;
    auto b = a;
    FrameField frame = m->frame;
    b.diffusion = [frame, Q](const Vec& x) { return Mat(frame(x) * Q); };

    IntegratorConfig cfg;
    cfg.scheme = Scheme::heun;
    cfg.dt = dt;
    cfg.t_final = T;
    cfg.paths = n_paths;
    cfg.thin = std::llround(T / dt);

    cfg.seed = seed;
    auto ea = simulate_ensemble(a, cfg);
    cfg.seed = seed + 1;
    auto eb = simulate_ensemble(b, cfg);

    auto f = [](const Vec& x) { return std::cos(x(0)); };
    std::size_t last = ea.stored_steps.size() - 1;
    auto [mean_a, se_a] = ea.mean_se(f, last);
    auto [mean_b, se_b] = eb.mean_se(f, last);
    double combined = std::sqrt(se_a * se_a + se_b * se_b);

    VerificationReport r;
    r.test = "frame-mixing";
    r.seed = seed;
    r.params = {{"manifold", m->name},
                {"paths", std::to_string(n_paths)},
                {"dt", format_double(dt)},
                {"t_final", format_double(T)},
                {"mixing", "rotation 0.7 with reflection"}};

    SeriesPoint sp;
    sp.t = T;
    sp.estimate = mean_b;
    sp.target = mean_a;
    sp.se = combined;
    sp.tol = 3.0 * combined;
    r.series.push_back(sp);
    r.max_abs_deviation = std::abs(mean_a - mean_b);
    r.pass = r.max_abs_deviation <= sp.tol;
    return r;
}

std::vector<std::string> verification_names() {
    return {"so3-mean-decay",     "sphere-eigen-decay", "hyperbolic-log-drift",
            "torus-stationary",   "ito-strat-agreement", "generator-check",
            "frame-mixing"};
}

std::vector<VerificationReport> run_verification(const std::string& name,
                                                 const VerifyOptions& opt) {
    auto paths = [&](std::int64_t d) { return opt.paths > 0 ? opt.paths : d; };
    auto dt = [&](double d) { return opt.dt > 0 ? opt.dt : d; };
    auto tfin = [&](double d) { return opt.t_final > 0 ? opt.t_final : d; };
    auto tol = [&](double d) { return opt.tol > 0 ? opt.tol : d; };

    if (name == "so3-mean-decay")
        return {so3_mean_decay(paths(10000), dt(1e-3), tfin(2.0), opt.seed,
                               tol(0.05))};
    if (name == "sphere-eigen-decay") {
        std::vector<VerificationReport> out;
        for (int n : {2, 3})
            out.push_back(
                sphere_eigen_decay(n, paths(20000), dt(1e-3), opt.seed, tol(0.01)));
        return out;
    }
    if (name == "hyperbolic-log-drift") {
        std::vector<VerificationReport> out;
        for (int n : {2, 3})
            out.push_back(hyperbolic_log_drift(n, paths(20000), dt(1e-3), tfin(1.0),
                                               opt.seed));
        return out;
    }
    if (name == "torus-stationary")
        return {torus_stationary_test(2.0, 1.0, paths(5000), tfin(200.0), 36,
                                      opt.seed, dt(2.5e-3), tol(0.02), false)};
    if (name == "ito-strat-agreement") {
        std::vector<VerificationReport> out;
        for (const auto& mn : catalog_names())
            out.push_back(
                ito_strat_agreement(mn, tfin(0.5), paths(20000), opt.seed, dt(1e-3)));
        return out;
    }
    if (name == "generator-check") {
        std::vector<VerificationReport> out;
        for (const auto& mn : catalog_names())
            out.push_back(
                generator_check(mn, dt(1e-3), paths(200000), opt.seed, tol(0.02)));
        return out;
    }
    if (name == "frame-mixing")
        return {frame_mixing_agreement(opt.seed, tfin(0.5), paths(20000), dt(1e-3))};
    throw UsageError("unknown verification '" + name + "'; see verification_names()");
}

}  // namespace rbm
