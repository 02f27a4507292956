// Command line front end: catalog listing, pointwise geometry inspection,
// trajectory simulation with CSV output, and the statistical verification
// suite. Exit codes: 0 success, 1 usage error, 2 domain error, 3 verification
// failure.
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "rbm/montecarlo.hpp"
#include "rbm/output.hpp"
#include "rbm/sde.hpp"

namespace {

using namespace rbm;

Vec parse_vec(const std::string& csv) {
    std::vector<double> xs;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            xs.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("malformed coordinate list '" + csv + "'");
        }
    }
    if (xs.empty()) throw UsageError("empty coordinate list");
    Vec v(static_cast<int>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) v(static_cast<int>(i)) = xs[i];
    return v;
}

std::map<std::string, double> parse_params(const std::vector<std::string>& kvs) {
    std::map<std::string, double> out;
    for (const auto& kv : kvs) {
        auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw UsageError("expected key=value, got '" + kv + "'");
        try {
            out[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
        } catch (const std::exception&) {
            throw UsageError("malformed parameter value in '" + kv + "'");
        }
    }
    return out;
}

void print_matrix(const std::string& label, const Mat& m) {
    std::cout << label << ":\n";
    for (int i = 0; i < m.rows(); ++i) {
        std::cout << " ";
        for (int j = 0; j < m.cols(); ++j) std::cout << " " << format_double(m(i, j));
        std::cout << "\n";
    }
}

void print_vec(const std::string& label, const Vec& v) {
    std::cout << label << ":";
    for (int i = 0; i < v.size(); ++i) std::cout << " " << format_double(v(i));
    std::cout << "\n";
}

int cmd_list() {
    std::cout << "manifolds:\n";
    for (const auto& name : catalog_names()) {
        auto m = make_manifold(name);
        std::cout << "  " << name << "  dim=" << m->dim
                  << " state_dim=" << m->state_dim << " backends=";
        bool first = true;
        for (auto b : m->backends) {
            std::cout << (first ? "" : ",") << to_string(b);
            first = false;
        }
        std::cout << " default=" << to_string(m->default_backend);
        if (!m->params.empty()) {
            std::cout << " params=";
            bool f2 = true;
            for (const auto& [k, v] : m->params) {
                std::cout << (f2 ? "" : ",") << k << "=" << format_double(v);
                f2 = false;
            }
        }
        std::cout << "\n";
    }
    std::cout << "verifications:\n";
    for (const auto& name : verification_names()) std::cout << "  " << name << "\n";
    return 0;
}

int cmd_geometry(const std::string& manifold,
                 const std::vector<std::string>& params, const std::string& point) {
    auto m = make_manifold(manifold, parse_params(params));
    Vec p = point.empty() ? m->default_start : parse_vec(point);
    if (p.size() != m->state_dim)
        throw UsageError("point has " + std::to_string(p.size()) +
                         " coordinates, expected " + std::to_string(m->state_dim));
    if (!m->valid_state(p))
        throw DomainError("point is outside the validity domain of '" + m->name + "'");

    std::cout << "manifold: " << m->name << "\n";
    std::cout << "dim: " << m->dim << "\n";
    std::cout << "state_dim: " << m->state_dim << "\n";
    print_vec("point", p);
    std::cout << "residual: " << format_double(m->residual(p)) << "\n";

    if (m->has(Backend::chart)) {
        print_matrix("metric", m->metric(p));
        print_matrix("frame", m->frame(p));
        ChristoffelSymbols gamma = m->christoffel
                                       ? m->christoffel(p)
                                       : christoffel_from_metric(m->metric, p);
        for (int k = 0; k < gamma.dim(); ++k)
            print_matrix("christoffel_" + std::to_string(k), gamma.gamma[k]);
        auto prob = make_brownian_problem(m, Backend::chart,
                                          Formulation::stratonovich);
        print_vec("stratonovich_drift", prob.drift(p));
    }
    if (m->has(Backend::embedded)) {
        Mat P = m->projection(p);
        std::cout << "projection_trace: " << format_double(P.trace()) << "\n";
        Vec H = m->mean_curvature ? m->mean_curvature(p)
                                  : mean_curvature_numeric(m->projection, p,
                                                           m->ambient_weight);
        print_vec("mean_curvature", H);
    }
    if (m->has(Backend::group)) {
        Vec j = canonical_drift(*m->structure);
        print_vec("canonical_drift", j);
        std::cout << "unimodular: " << (is_unimodular(*m->structure) ? "true" : "false")
                  << "\n";
    }
    return 0;
}

struct SimulateArgs {
    std::string manifold;
    std::vector<std::string> params;
    std::string backend;
    std::string formulation = "stratonovich";
    std::string scheme;
    double dt = 1e-3;
    double t_final = 1.0;
    std::int64_t paths = 1;
    std::uint64_t seed = 0;
    std::int64_t thin = 0;
    int workers = 0;
    std::string start;
    std::string out;
    std::string domain_policy = "error";
    bool no_retraction = false;
};

int cmd_simulate(const SimulateArgs& a) {
    auto m = make_manifold(a.manifold, parse_params(a.params));
    Backend backend =
        a.backend.empty() ? m->default_backend : backend_from_string(a.backend);
    Formulation formulation = formulation_from_string(a.formulation);
    auto prob = make_brownian_problem(m, backend, formulation);

    IntegratorConfig cfg;
    cfg.scheme = a.scheme.empty() ? default_scheme(prob) : scheme_from_string(a.scheme);
    cfg.dt = a.dt;
    cfg.t_final = a.t_final;
    cfg.paths = a.paths;
    cfg.seed = a.seed;
    cfg.thin = a.thin;
    cfg.workers = a.workers;
    cfg.retraction = !a.no_retraction;
    if (a.domain_policy == "error")
        cfg.domain_policy = DomainPolicy::error;
    else if (a.domain_policy == "absorb")
        cfg.domain_policy = DomainPolicy::absorb;
    else
        throw UsageError("unknown domain policy '" + a.domain_policy +
                         "' (error, absorb)");
    if (!a.start.empty()) cfg.start = parse_vec(a.start);

    auto t0 = std::chrono::steady_clock::now();
    auto e = simulate_ensemble(prob, cfg);
    auto t1 = std::chrono::steady_clock::now();
    double wall = std::chrono::duration<double>(t1 - t0).count();

    std::string csv_path = a.out.empty() ? "-" : a.out;
    if (!a.out.empty()) {
        std::ofstream f(a.out, std::ios::binary);
        if (!f) throw UsageError("cannot open '" + a.out + "' for writing");
        write_csv(f, e);
    }
    std::cout << simulation_summary(e, csv_path, wall);
    return 0;
}

struct VerifyArgs {
    std::string name;
    std::int64_t paths = -1;
    double dt = -1;
    double t_final = -1;
    std::uint64_t seed = 2024;
    double tol = -1;
    std::string out;
};

int cmd_verify(const VerifyArgs& a) {
    VerifyOptions opt;
    opt.paths = a.paths;
    opt.dt = a.dt;
    opt.t_final = a.t_final;
    opt.seed = a.seed;
    opt.tol = a.tol;

    auto reports = run_verification(a.name, opt);
    std::string all;
    bool ok = true;
    for (const auto& r : reports) {
        all += r.to_text() + "\n";
        ok = ok && r.pass;
    }
    std::cout << all;
    if (!a.out.empty()) {
        std::ofstream f(a.out, std::ios::binary);
        if (!f) throw UsageError("cannot open '" + a.out + "' for writing");
        f << all;
    }
    return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Brownian motion on Riemannian manifolds: simulation and "
                 "statistical verification"};
    app.require_subcommand(1);

    auto* list = app.add_subcommand("list", "catalog manifolds and verifications");

    auto* geom = app.add_subcommand("geometry", "inspect geometry at a point");
    std::string g_manifold, g_point;
    std::vector<std::string> g_params;
    geom->add_option("--manifold", g_manifold, "catalog manifold name")->required();
    geom->add_option("--param", g_params, "manifold parameter key=value");
    geom->add_option("--point", g_point, "comma separated state coordinates");

    auto* sim = app.add_subcommand("simulate", "integrate a brownian ensemble");
    SimulateArgs sa;
    sim->add_option("--manifold", sa.manifold, "catalog manifold name")->required();
    sim->add_option("--param", sa.params, "manifold parameter key=value");
    sim->add_option("--backend", sa.backend, "chart, embedded, or group");
    sim->add_option("--formulation", sa.formulation, "ito or stratonovich");
    sim->add_option("--scheme", sa.scheme,
                    "euler-maruyama, heun, or group-exponential");
    sim->add_option("--dt", sa.dt, "step size");
    sim->add_option("--t-final", sa.t_final, "final time");
    sim->add_option("--paths", sa.paths, "number of paths");
    sim->add_option("--seed", sa.seed, "noise seed");
    sim->add_option("--thin", sa.thin, "store every thin-th step (0 = auto)");
    sim->add_option("--workers", sa.workers, "worker threads (0 = hardware)");
    sim->add_option("--start", sa.start, "comma separated start state");
    sim->add_option("--out", sa.out, "trajectory CSV path");
    sim->add_option("--domain-policy", sa.domain_policy, "error or absorb");
    sim->add_flag("--no-retraction", sa.no_retraction,
                  "skip the constraint retraction (embedded backends)");

    auto* ver = app.add_subcommand("verify", "run a statistical verification");
    VerifyArgs va;
    ver->add_option("name", va.name, "verification name (see `rbm list`)")
        ->required();
    ver->add_option("--paths", va.paths, "override ensemble size");
    ver->add_option("--dt", va.dt, "override step size");
    ver->add_option("--t-final", va.t_final, "override final time");
    ver->add_option("--seed", va.seed, "noise seed");
    ver->add_option("--tol", va.tol, "override tolerance");
    ver->add_option("--out", va.out, "write the report text here as well");

    try {
        app.parse(argc, argv);
        if (list->parsed()) return cmd_list();
        if (geom->parsed()) return cmd_geometry(g_manifold, g_params, g_point);
        if (sim->parsed()) return cmd_simulate(sa);
        if (ver->parsed()) return cmd_verify(va);
        return 1;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const rbm::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const rbm::DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const rbm::EnsembleError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        for (const auto& [id, msg] : e.failures)
            std::cerr << "  path " << id << ": " << msg << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
