#include "rbm/geometry.hpp"

#include <cmath>

namespace rbm {

MetricTensor MetricTensor::from_matrix(const Mat& g) {
    if (g.rows() != g.cols())
        throw DegenerateMetricError("metric matrix is not square");
    if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + g.cwiseAbs().maxCoeff()))
        throw DegenerateMetricError("metric matrix is not symmetric");
    Eigen::LLT<Mat> llt(g);
    if (llt.info() != Eigen::Success)
        throw DegenerateMetricError("metric matrix is not positive definite");
    MetricTensor m;
    m.g = g;
    m.g_inv = llt.solve(Mat::Identity(g.rows(), g.cols()));
    return m;
}

Vec ChristoffelSymbols::contract(const Vec& X, const Vec& Y) const {
    int n = dim();
    Vec out(n);
    for (int k = 0; k < n; ++k) out(k) = X.dot(gamma[k] * Y);
    return out;
}

double ChristoffelSymbols::max_asymmetry() const {
    double worst = 0;
    for (const Mat& g : gamma)
        worst = std::max(worst, (g - g.transpose()).cwiseAbs().maxCoeff());
    return worst;
}

Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& p, double h) {
    int n = static_cast<int>(p.size());
    Vec g(n);
    Vec q = p;
    for (int i = 0; i < n; ++i) {
        q(i) = p(i) + h;
        double fp = f(q);
        q(i) = p(i) - h;
        double fm = f(q);
        q(i) = p(i);
        g(i) = (fp - fm) / (2 * h);
    }
    return g;
}

Mat fd_jacobian(const std::function<Vec(const Vec&)>& F, const Vec& p, double h) {
    int n = static_cast<int>(p.size());
    Vec q = p;
    q(0) = p(0) + h;
    Vec probe = F(q);
    q(0) = p(0);
    Mat J(probe.size(), n);
    for (int j = 0; j < n; ++j) {
        q(j) = p(j) + h;
        Vec fp = F(q);
        q(j) = p(j) - h;
        Vec fm = F(q);
        q(j) = p(j);
        J.col(j) = (fp - fm) / (2 * h);
    }
    return J;
}

Mat fd_hessian(const std::function<double(const Vec&)>& f, const Vec& p, double h) {
    int n = static_cast<int>(p.size());
    Mat H(n, n);
    double f0 = f(p);
    Vec q = p;
    for (int i = 0; i < n; ++i) {
        q(i) = p(i) + h;
        double fp = f(q);
        q(i) = p(i) - h;
        double fm = f(q);
        q(i) = p(i);
        H(i, i) = (fp - 2 * f0 + fm) / (h * h);
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            q(i) = p(i) + h;
            q(j) = p(j) + h;
            double fpp = f(q);
            q(j) = p(j) - h;
            double fpm = f(q);
            q(i) = p(i) - h;
            double fmm = f(q);
            q(j) = p(j) + h;
            double fmp = f(q);
            q(i) = p(i);
            q(j) = p(j);
            H(i, j) = H(j, i) = (fpp - fpm - fmp + fmm) / (4 * h * h);
        }
    return H;
}

Vec scalar_gradient(const ScalarField& f, const Vec& p, double h) {
    if (f.gradient) return f.gradient(p);
    return fd_gradient(f.value, p, h);
}

Mat scalar_hessian(const ScalarField& f, const Vec& p, double h) {
    if (f.hessian) return f.hessian(p);
    if (f.gradient) return fd_jacobian(f.gradient, p, h);
    return fd_hessian(f.value, p, h);
}

Mat field_jacobian(const VectorFieldFn& F, const Vec& p, double h) {
    if (F.jacobian) return F.jacobian(p);
    return fd_jacobian(F.value, p, h);
}

Vec directional_derivative(const std::function<Vec(const Vec&)>& F, const Vec& x,
                           const Vec& dir, double h) {
    double scale = dir.norm();
    if (scale == 0.0) return Vec::Zero(F(x).size());
    Vec u = dir / scale;
    return scale / (2 * h) * (F(x + h * u) - F(x - h * u));
}

ChristoffelSymbols christoffel_from_metric(const MetricField& metric, const Vec& p,
                                           double h) {
    int n = static_cast<int>(p.size());
    MetricTensor g = MetricTensor::from_matrix(metric(p));

    // dg[m](i,j) = d_m g_ij
    std::vector<Mat> dg(n);
    Vec q = p;
    for (int m = 0; m < n; ++m) {
        q(m) = p(m) + h;
        Mat gp = metric(q);
        q(m) = p(m) - h;
        Mat gm = metric(q);
        q(m) = p(m);
        dg[m] = (gp - gm) / (2 * h);
    }

    ChristoffelSymbols cs;
    cs.gamma.assign(n, Mat::Zero(n, n));
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            Vec lower(n);  // 1/2 (d_i g_jm + d_j g_im - d_m g_ij)
            for (int m = 0; m < n; ++m)
                lower(m) = 0.5 * (dg[i](j, m) + dg[j](i, m) - dg[m](i, j));
            Vec upper = g.g_inv * lower;
            for (int k = 0; k < n; ++k) cs.gamma[k](i, j) = cs.gamma[k](j, i) = upper(k);
        }
    return cs;
}

Vec covariant_derivative_chart(const ChristoffelSymbols& gamma, const VectorFieldFn& Y,
                               const Vec& X, const Vec& p, double h) {
    Mat J = Y.jacobian ? Y.jacobian(p) : fd_jacobian(Y.value, p, h);
    return J * X + gamma.contract(X, Y.value(p));
}

Vec frame_drift(const FrameField& frame, const ChristoffelSymbols& gamma, const Vec& p,
                double h) {
    int n = static_cast<int>(p.size());
    Mat e0 = frame(p);
    Vec drift = Vec::Zero(n);
    for (int i = 0; i < n; ++i) {
        Vec ei = e0.col(i);
        Vec flat = directional_derivative(
            [&frame, i](const Vec& q) { return Vec(frame(q).col(i)); }, p, ei, h);
        drift -= 0.5 * (flat + gamma.contract(ei, ei));
    }
    return drift;
}

Mat covariant_hessian_matrix(const ScalarField& f, const ChristoffelSymbols& gamma,
                             const Vec& p, double h) {
    int n = static_cast<int>(p.size());
    Vec grad = scalar_gradient(f, p);
    Mat H = scalar_hessian(f, p, h);
    for (int k = 0; k < n; ++k) H -= grad(k) * gamma.gamma[k];
    return H;
}

double hessian_bilinear(const ScalarField& f, const ChristoffelSymbols& gamma,
                        const Vec& p, const Vec& X, const Vec& Y, double h) {
    return X.dot(covariant_hessian_matrix(f, gamma, p, h) * Y);
}

Vec gradient_in_frame(const ScalarField& f, const FrameField& frame, const Vec& p,
                      double h) {
    Mat e = frame(p);
    Vec df = scalar_gradient(f, p, h);
    // sum_i (E_i . df) E_i = E E^T df
    return e * (e.transpose() * df);
}

double divergence_in_frame(const VectorFieldFn& X, const FrameField& frame,
                           const ChristoffelSymbols& gamma, const Vec& p, double h) {
    int n = static_cast<int>(p.size());
    Mat e = frame(p);
    Mat J = field_jacobian(X, p, h);
    Vec x = X.value(p);
    // columns nabla_{E_i} X; the i-th frame coefficient of column i sums to
    // the divergence, and frame coefficients are E^{-1} v for an orthonormal E
    Mat cols(n, n);
    for (int i = 0; i < n; ++i)
        cols.col(i) = J * e.col(i) + gamma.contract(e.col(i), x);
    return e.partialPivLu().solve(cols).trace();
}

double laplace_beltrami(const ScalarField& f, const FrameField& frame,
                        const ChristoffelSymbols& gamma, const Vec& p, double h) {
    Mat e = frame(p);
    Mat hc = covariant_hessian_matrix(f, gamma, p, h);
    return (e.transpose() * hc * e).trace();
}

Mat pseudo_frame(const ProjectionField& proj, const Vec& x, double ambient_weight) {
    return proj(x) / std::sqrt(ambient_weight);
}

Vec second_fundamental_form(const ProjectionField& proj, const Vec& x, const Vec& X,
                            const Vec& Y, double h) {
    Mat P = proj(x);
    // D_X of the projected extension y -> P(y) Y
    Vec dPY = directional_derivative(
        [&proj, &Y](const Vec& q) { return Vec(proj(q) * Y); }, x, X, h);
    return dPY - P * dPY;
}

Vec mean_curvature_numeric(const ProjectionField& proj, const Vec& x,
                           double ambient_weight, double h) {
    int nb = static_cast<int>(x.size());
    Mat P = proj(x);
    Vec H = Vec::Zero(nb);
    for (int i = 0; i < nb; ++i) {
        Vec ti = P.col(i) / std::sqrt(ambient_weight);
        H += second_fundamental_form(proj, x, ti, ti, h);
    }
    return H;
}

double laplace_beltrami_embedded(const ScalarField& f, const ProjectionField& proj,
                                 const Vec& mean_curv, const Vec& x,
                                 double ambient_weight, double h) {
    Mat hess = scalar_hessian(f, x, h);
    Vec grad = scalar_gradient(f, x);
    return (hess * proj(x)).trace() / ambient_weight + mean_curv.dot(grad);
}

}  // namespace rbm
