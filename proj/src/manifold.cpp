#include "rbm/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rbm {

std::string to_string(Backend b) {
    switch (b) {
        case Backend::chart: return "chart";
        case Backend::embedded: return "embedded";
        case Backend::group: return "group";
    }
    throw Error("unreachable backend tag");
}

Backend backend_from_string(const std::string& s) {
    if (s == "chart") return Backend::chart;
    if (s == "embedded") return Backend::embedded;
    if (s == "group") return Backend::group;
    throw UsageError("unknown backend '" + s + "' (chart, embedded, group)");
}

bool ManifoldDescriptor::has(Backend b) const {
    return std::find(backends.begin(), backends.end(), b) != backends.end();
}

bool ManifoldDescriptor::valid_state(const Vec& x, double tol) const {
    if (x.size() != state_dim) return false;
    if (!x.allFinite()) return false;
    if (chart_valid) return chart_valid(x);
    if (constraint_residual) return constraint_residual(x) <= tol;
    return true;
}

double ManifoldDescriptor::residual(const Vec& x) const {
    if (constraint_residual) return constraint_residual(x);
    if (chart_valid && !chart_valid(x)) return std::numeric_limits<double>::infinity();
    return 0.0;
}

Eigen::Matrix3d hat_so3(const Eigen::Vector3d& w) {
    Eigen::Matrix3d m;
    m << 0, -w(2), w(1), w(2), 0, -w(0), -w(1), w(0), 0;
    return m;
}

Eigen::Matrix3d rodrigues_exp(const Eigen::Vector3d& w) {
    double t2 = w.squaredNorm();
    Eigen::Matrix3d K = hat_so3(w);
    if (t2 < 1e-24) return Eigen::Matrix3d::Identity() + K + 0.5 * K * K;
    double t = std::sqrt(t2);
    return Eigen::Matrix3d::Identity() + (std::sin(t) / t) * K +
           ((1.0 - std::cos(t)) / t2) * K * K;
}

Eigen::Matrix2d aff_exp(double u, double v) {
    // exp([[u v];[0 0]]) = [[e^u, v phi(u)];[0, 1]], phi(u) = (e^u - 1)/u
    double phi = std::abs(u) < 1e-8 ? 1.0 + 0.5 * u + u * u / 6.0 : std::expm1(u) / u;
    Eigen::Matrix2d m;
    m << std::exp(u), v * phi, 0.0, 1.0;
    return m;
}

Mat polar_factor(const Mat& m) {
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat u = svd.matrixU(), v = svd.matrixV();
    Mat q = u * v.transpose();
    if (q.determinant() < 0) {
        // rotation-group branch: flip the weakest direction
        u.col(u.cols() - 1) *= -1.0;
        q = u * v.transpose();
    }
    return q;
}

namespace {

Vec vec_of(std::initializer_list<double> xs) {
    Vec v(static_cast<int>(xs.size()));
    int i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

// ---- sphere, polar chart ---------------------------------------------------

ManifoldPtr sphere2_chart_impl() {
    auto m = std::make_shared<ManifoldDescriptor>();
    m->name = "sphere2-chart";
    m->dim = 2;
    m->state_dim = 2;
    m->default_backend = Backend::chart;
    m->backends = {Backend::chart};
    m->default_start = vec_of({M_PI / 2, 0.0});

    m->metric = [](const Vec& p) {
        Mat g = Mat::Zero(2, 2);
        double s = std::sin(p(0));
        g(0, 0) = 1.0;
        g(1, 1) = s * s;
        return g;
    };
    m->christoffel = [](const Vec& p) {
        ChristoffelSymbols cs;
        cs.gamma.assign(2, Mat::Zero(2, 2));
        double s = std::sin(p(0)), c = std::cos(p(0));
        cs.gamma[0](1, 1) = -s * c;
        cs.gamma[1](0, 1) = cs.gamma[1](1, 0) = c / s;
        return cs;
    };
    m->frame = [](const Vec& p) {
        Mat e = Mat::Zero(2, 2);
        e(0, 0) = 1.0;
        e(1, 1) = 1.0 / std::sin(p(0));
        return e;
    };
    m->stratonovich_drift = VectorFieldFn{
        [](const Vec& p) {
            return vec_of({0.5 * std::cos(p(0)) / std::sin(p(0)), 0.0});
        },
        nullptr};
    m->chart_valid = [](const Vec& p) { return p(0) > 0.0 && p(0) < M_PI; };
    return m;
}

// ---- torus of revolution, angle chart --------------------------------------

void check_torus_params(double R, double r) {
    if (!(r > 0.0) || !(R > r))
        throw UsageError("torus radii must satisfy R > r > 0");
}

ManifoldPtr torus2_chart_impl(double R, double r) {
    check_torus_params(R, r);
    auto m = std::make_shared<ManifoldDescriptor>();
    m->name = "torus2-chart";
    m->dim = 2;
    m->state_dim = 2;
    m->default_backend = Backend::chart;
    m->backends = {Backend::chart};
    m->params = {{"R", R}, {"r", r}};
    m->default_start = vec_of({0.0, 0.0});

    m->metric = [R, r](const Vec& p) {
        Mat g = Mat::Zero(2, 2);
        double w = R + r * std::cos(p(0));
        g(0, 0) = r * r;
        g(1, 1) = w * w;
        return g;
    };
    m->christoffel = [R, r](const Vec& p) {
        ChristoffelSymbols cs;
        cs.gamma.assign(2, Mat::Zero(2, 2));
        double s = std::sin(p(0)), w = R + r * std::cos(p(0));
        cs.gamma[0](1, 1) = w * s / r;
        cs.gamma[1](0, 1) = cs.gamma[1](1, 0) = -r * s / w;
        return cs;
    };
    m->frame = [R, r](const Vec& p) {
        Mat e = Mat::Zero(2, 2);
        e(0, 0) = 1.0 / r;
        e(1, 1) = 1.0 / (R + r * std::cos(p(0)));
        return e;
    };
    m->stratonovich_drift = VectorFieldFn{
        [R, r](const Vec& p) {
            return vec_of({-std::sin(p(0)) / (2.0 * r * (R + r * std::cos(p(0)))), 0.0});
        },
        nullptr};
    return m;
}

// ---- flat torus as an abelian group ----------------------------------------

ManifoldPtr torus2_group_impl(double R, double r) {
    check_torus_params(R, r);
    auto m = std::make_shared<ManifoldDescriptor>();
    m->name = "torus2-group";
    m->dim = 2;
    m->state_dim = 2;
    m->default_backend = Backend::group;
    m->backends = {Backend::group, Backend::chart};
    m->params = {{"R", R}, {"r", r}};
    m->default_start = vec_of({0.0, 0.0});

    double a = r, b = R + r;  // frame scales 1/a, 1/b
    m->metric = [a, b](const Vec&) {
        Mat g = Mat::Zero(2, 2);
        g(0, 0) = a * a;
        g(1, 1) = b * b;
        return g;
    };
    m->christoffel = [](const Vec&) {
        ChristoffelSymbols cs;
        cs.gamma.assign(2, Mat::Zero(2, 2));
        return cs;
    };
    Mat frame = Mat::Zero(2, 2);
    frame(0, 0) = 1.0 / a;
    frame(1, 1) = 1.0 / b;
    m->frame = [frame](const Vec&) { return frame; };
    m->stratonovich_drift =
        VectorFieldFn{[](const Vec&) { return Vec(Vec::Zero(2)); }, nullptr};

    // abelian algebra in abstract orthonormal coordinates
    std::vector<Vec> elems = {Vec::Unit(2, 0), Vec::Unit(2, 1)};
    auto algebra = std::make_shared<LieAlgebraBasis>(LieAlgebraBasis::vector_basis(
        elems, [](const Vec&, const Vec&) { return Vec(Vec::Zero(2)); }, 1.0));
    m->algebra = algebra;
    m->structure =
        std::make_shared<StructureConstants>(structure_constants(*algebra));
    m->group_translate = [a, b](const Vec& s, const Vec& c) {
        return vec_of({s(0) + c(0) / a, s(1) + c(1) / b});
    };
    m->group_frame = [frame](const Vec&) { return frame; };
    m->group_ito_drift = [](const Vec&) { return Vec(Vec::Zero(2)); };
    return m;
}

// ---- hyperbolic upper half space -------------------------------------------

ManifoldPtr hyperbolic_impl(int n) {
    if (n < 2) throw UsageError("hyperbolic space needs dimension n >= 2");
    auto m = std::make_shared<ManifoldDescriptor>();
    m->name = "hyperbolic-n";
    m->dim = n;
    m->state_dim = n;
    m->default_backend = Backend::chart;
    m->backends = {Backend::chart};
    m->params = {{"n", double(n)}};
    m->default_start = Vec::Zero(n);
    m->default_start(n - 1) = 1.0;
    m->positivity_retry = true;

    int last = n - 1;
    m->metric = [n, last](const Vec& p) {
        double xn2 = p(last) * p(last);
        return Mat(Mat::Identity(n, n) / xn2);
    };
    m->christoffel = [n, last](const Vec& p) {
        ChristoffelSymbols cs;
        cs.gamma.assign(n, Mat::Zero(n, n));
        double inv = 1.0 / p(last);
        for (int i = 0; i < last; ++i) {
            cs.gamma[i](i, last) = cs.gamma[i](last, i) = -inv;
            cs.gamma[last](i, i) = inv;
        }
        cs.gamma[last](last, last) = -inv;
        return cs;
    };
    m->frame = [n, last](const Vec& p) { return Mat(p(last) * Mat::Identity(n, n)); };
    m->stratonovich_drift = VectorFieldFn{[n, last](const Vec& p) {
                                              Vec d = Vec::Zero(n);
                                              d(last) = -0.5 * (n - 1) * p(last);
                                              return d;
                                          },
                                          nullptr};
    m->chart_valid = [last](const Vec& p) { return p(last) > 0.0; };
    return m;
}

// ---- embedded unit sphere ---------------------------------------------------

ManifoldPtr sphere_embedded_impl(int n) {
    if (n < 2) throw UsageError("embedded sphere needs dimension n >= 2");
    auto m = std::make_shared<ManifoldDescriptor>();
    m->name = "sphere-n";
    m->dim = n;
    m->state_dim = n + 1;
    m->default_backend = Backend::embedded;
    m->backends = {Backend::embedded};
    m->params = {{"n", double(n)}};
    m->default_start = Vec::Zero(n + 1);
    m->default_start(n) = 1.0;
    m->ambient_weight = 1.0;

    int nb = n + 1;
    m->projection = [nb](const Vec& x) {
        return Mat(Mat::Identity(nb, nb) - x * x.transpose());
    };
    m->mean_curvature = [n](const Vec& x) { return Vec(-double(n) * x); };
    m->retraction = [](const Vec& x) {
        double nrm = x.norm();
        if (nrm < 1e-12) throw DomainError("sphere retraction at the origin");
        return Vec(x / nrm);
    };
    m->constraint_residual = [](const Vec& x) {
        return std::abs(x.squaredNorm() - 1.0);
    };
    return m;
}

// ---- rotation group ----------------------------------------------------------

ManifoldPtr so3_impl() {
    auto m = std::make_shared<ManifoldDescriptor>();
    m->name = "so3";
    m->dim = 3;
    m->state_dim = 9;
    m->matrix_size = 3;
    m->default_backend = Backend::embedded;
    m->backends = {Backend::embedded, Backend::group};
    m->default_start = flatten(Mat(Mat::Identity(3, 3)));
    m->ambient_weight = 0.5;

    m->projection = [](const Vec& x) {
        Eigen::Matrix3d R = unflatten(x, 3);
        Mat P(9, 9);
        for (int j = 0; j < 9; ++j) {
            Eigen::Matrix3d unit = Eigen::Matrix3d::Zero();
            unit(j / 3, j % 3) = 1.0;
            // tangent projector A -> (A - R A^T R)/2
            P.col(j) = flatten(Mat(0.5 * (unit - R * unit.transpose() * R)));
        }
        return P;
    };
    m->mean_curvature = [](const Vec& x) { return Vec(-2.0 * x); };
    m->retraction = [](const Vec& x) { return flatten(polar_factor(unflatten(x, 3))); };
    m->constraint_residual = [](const Vec& x) {
        Eigen::Matrix3d R = unflatten(x, 3);
        return (R.transpose() * R - Eigen::Matrix3d::Identity()).norm();
    };

    std::vector<Mat> hats;
    for (int i = 0; i < 3; ++i)
        hats.push_back(hat_so3(Eigen::Vector3d::Unit(i)));
    auto algebra =
        std::make_shared<LieAlgebraBasis>(LieAlgebraBasis::matrix_basis(hats, 0.5));
    m->algebra = algebra;
    m->structure = std::make_shared<StructureConstants>(structure_constants(*algebra));
    m->group_translate = [](const Vec& s, const Vec& c) {
        Eigen::Matrix3d R = unflatten(s, 3);
        return flatten(Mat(R * rodrigues_exp(Eigen::Vector3d(c(0), c(1), c(2)))));
    };
    m->group_frame = [](const Vec& s) {
        Eigen::Matrix3d R = unflatten(s, 3);
        Mat sig(9, 3);
        for (int i = 0; i < 3; ++i)
            sig.col(i) = flatten(Mat(R * hat_so3(Eigen::Vector3d::Unit(i))));
        return sig;
    };
    // J = 0 and sum_i e_i^2 = -2 I, so the ito drift is -state
    m->group_ito_drift = [](const Vec& s) { return Vec(-s); };
    return m;
}

// ---- affine line group -------------------------------------------------------

ManifoldPtr aff_line_impl() {
    auto m = std::make_shared<ManifoldDescriptor>();
    m->name = "aff-line";
    m->dim = 2;
    m->state_dim = 2;  // states (a, b) with a > 0
    m->default_backend = Backend::group;
    m->backends = {Backend::group};
    m->default_start = vec_of({1.0, 0.0});
    m->positivity_retry = true;
    m->chart_valid = [](const Vec& g) { return g(0) > 0.0; };

    double s2 = std::sqrt(2.0);
    std::vector<Mat> elems(2, Mat::Zero(2, 2));
    elems[0](0, 0) = s2;
    elems[1](0, 1) = s2;
    auto algebra =
        std::make_shared<LieAlgebraBasis>(LieAlgebraBasis::matrix_basis(elems, 0.5));
    m->algebra = algebra;
    m->structure = std::make_shared<StructureConstants>(structure_constants(*algebra));

    m->group_translate = [s2](const Vec& g, const Vec& c) {
        Eigen::Matrix2d e = aff_exp(s2 * c(0), s2 * c(1));
        return vec_of({g(0) * e(0, 0), g(0) * e(0, 1) + g(1)});
    };
    m->group_frame = [s2](const Vec& g) {
        Mat sig = Mat::Zero(2, 2);
        sig(0, 0) = s2 * g(0);
        sig(1, 1) = s2 * g(0);
        return sig;
    };
    // g (mat(J)/2 + 1/2 sum e_i^2) = g (-E11 + E11) = 0
    m->group_ito_drift = [](const Vec&) { return Vec(Vec::Zero(2)); };
    return m;
}

void apply_params(std::map<std::string, double>& dst,
                  const std::map<std::string, double>& overrides,
                  const std::string& name) {
    for (const auto& [k, v] : overrides) {
        if (dst.find(k) == dst.end())
            throw UsageError("manifold '" + name + "' has no parameter '" + k + "'");
        dst[k] = v;
    }
}

int int_param(const std::map<std::string, double>& p, const std::string& key) {
    double v = p.at(key);
    if (v != std::floor(v)) throw UsageError("parameter '" + key + "' must be integral");
    return static_cast<int>(v);
}

}  // namespace

ManifoldPtr make_sphere2_chart() { return sphere2_chart_impl(); }
ManifoldPtr make_torus2_chart(double R, double r) { return torus2_chart_impl(R, r); }
ManifoldPtr make_torus2_group(double R, double r) { return torus2_group_impl(R, r); }
ManifoldPtr make_hyperbolic(int n) { return hyperbolic_impl(n); }
ManifoldPtr make_sphere_embedded(int n) { return sphere_embedded_impl(n); }
ManifoldPtr make_so3() { return so3_impl(); }
ManifoldPtr make_aff_line() { return aff_line_impl(); }

std::vector<std::string> catalog_names() {
    return {"sphere2-chart", "torus2-chart", "torus2-group", "hyperbolic-n",
            "sphere-n",      "so3",          "aff-line"};
}

ManifoldPtr make_manifold(const std::string& name,
                          const std::map<std::string, double>& params) {
    std::map<std::string, double> p;
    if (name == "sphere2-chart" || name == "so3" || name == "aff-line") {
        apply_params(p, params, name);  // no parameters to override
        if (name == "sphere2-chart") return make_sphere2_chart();
        if (name == "so3") return make_so3();
        return make_aff_line();
    }
    if (name == "torus2-chart" || name == "torus2-group") {
        p = {{"R", 2.0}, {"r", 1.0}};
        apply_params(p, params, name);
        return name == "torus2-chart" ? make_torus2_chart(p["R"], p["r"])
                                      : make_torus2_group(p["R"], p["r"]);
    }
    if (name == "hyperbolic-n") {
        p = {{"n", 2.0}};
        apply_params(p, params, name);
        return make_hyperbolic(int_param(p, "n"));
    }
    if (name == "sphere-n") {
        p = {{"n", 2.0}};
        apply_params(p, params, name);
        return make_sphere_embedded(int_param(p, "n"));
    }
    throw UsageError("unknown manifold '" + name + "'; try one of: sphere2-chart, "
                     "torus2-chart, torus2-group, hyperbolic-n, sphere-n, so3, aff-line");
}

}  // namespace rbm
