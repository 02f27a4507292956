// Chart-level differential geometry: metric, Christoffel symbols, orthonormal
// frames, gradient/divergence/Laplacian in frame form, covariant Hessian, and
// the embedded-submanifold operators built from a projection field.
//
// Derivative convention: central finite differences unless the field carries
// an analytic callback (callbacks always take precedence). First-order
// stencils default to kFdStep; second-order stencils use kFdStepSecond, the
// eps^(1/4) scaling that keeps roundoff near 1e-8. Both are per-call
// overridable.
#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "rbm/errors.hpp"

namespace rbm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kFdStep = 1e-5;
inline constexpr double kFdStepSecond = 1e-4;

// Symmetric positive definite metric with cached inverse.
struct MetricTensor {
    Mat g;
    Mat g_inv;

    // Validates symmetry and positive definiteness; throws DegenerateMetricError.
    static MetricTensor from_matrix(const Mat& g);
};

// gamma[k](i,j) = Gamma^k_ij, upper index first, symmetric in (i,j).
struct ChristoffelSymbols {
    std::vector<Mat> gamma;

    int dim() const { return static_cast<int>(gamma.size()); }
    // Gamma(X,Y)^k = Gamma^k_ij X^i Y^j
    Vec contract(const Vec& X, const Vec& Y) const;
    double max_asymmetry() const;
};

// Scalar function of the state vector with optional analytic derivatives.
struct ScalarField {
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> gradient;  // optional
    std::function<Mat(const Vec&)> hessian;   // optional

    double operator()(const Vec& p) const { return value(p); }
};

// Vector field with optional analytic Jacobian, J(i,j) = d V^i / d x^j.
struct VectorFieldFn {
    std::function<Vec(const Vec&)> value;
    std::function<Mat(const Vec&)> jacobian;  // optional

    Vec operator()(const Vec& p) const { return value(p); }
};

using MetricField = std::function<Mat(const Vec&)>;
// Columns are the frame vectors E_1..E_n in chart components.
using FrameField = std::function<Mat(const Vec&)>;
// x -> P(x), the orthogonal projector onto the tangent space in ambient
// (possibly flattened matrix) coordinates.
using ProjectionField = std::function<Mat(const Vec&)>;

// --- finite differences ---------------------------------------------------

Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& p,
                double h = kFdStep);
Mat fd_jacobian(const std::function<Vec(const Vec&)>& F, const Vec& p,
                double h = kFdStep);
Mat fd_hessian(const std::function<double(const Vec&)>& f, const Vec& p,
               double h = kFdStepSecond);

Vec scalar_gradient(const ScalarField& f, const Vec& p, double h = kFdStep);
Mat scalar_hessian(const ScalarField& f, const Vec& p, double h = kFdStepSecond);
Mat field_jacobian(const VectorFieldFn& F, const Vec& p, double h = kFdStep);

// d/dt F(x + t dir) at t=0; scales linearly in dir.
Vec directional_derivative(const std::function<Vec(const Vec&)>& F, const Vec& x,
                           const Vec& dir, double h = kFdStep);

// --- chart operators --------------------------------------------------------

// Gamma^k_ij = 1/2 g^km (d_i g_jm + d_j g_im - d_m g_ij), metric derivatives
// by central differences.
ChristoffelSymbols christoffel_from_metric(const MetricField& metric, const Vec& p,
                                           double h = kFdStep);

// (nabla_X Y)^k = X^i (d_i Y^k + Gamma^k_ij Y^j) for a vector X at p.
Vec covariant_derivative_chart(const ChristoffelSymbols& gamma, const VectorFieldFn& Y,
                               const Vec& X, const Vec& p, double h = kFdStep);

// -1/2 sum_i nabla_{E_i} E_i, the Stratonovich drift of the frame SDE.
Vec frame_drift(const FrameField& frame, const ChristoffelSymbols& gamma, const Vec& p,
                double h = kFdStep);

// Covariant Hessian matrix Hc_ij = d_i d_j f - Gamma^k_ij d_k f.
Mat covariant_hessian_matrix(const ScalarField& f, const ChristoffelSymbols& gamma,
                             const Vec& p, double h = kFdStepSecond);

// Hess f(X,Y) = X^i Y^j (d_i d_j f - Gamma^k_ij d_k f); symmetric in (X,Y).
double hessian_bilinear(const ScalarField& f, const ChristoffelSymbols& gamma,
                        const Vec& p, const Vec& X, const Vec& Y,
                        double h = kFdStepSecond);

// grad f = sum_i (E_i[f]) E_i, in chart components.
Vec gradient_in_frame(const ScalarField& f, const FrameField& frame, const Vec& p,
                      double h = kFdStep);

// div X = sum_i <nabla_{E_i} X, E_i>_g, evaluated via frame coefficients.
double divergence_in_frame(const VectorFieldFn& X, const FrameField& frame,
                           const ChristoffelSymbols& gamma, const Vec& p,
                           double h = kFdStep);

// Laplace-Beltrami via the frame trace of the covariant Hessian,
// sum_i (E_i[E_i[f]] - (nabla_{E_i}E_i)[f]).
double laplace_beltrami(const ScalarField& f, const FrameField& frame,
                        const ChristoffelSymbols& gamma, const Vec& p,
                        double h = kFdStepSecond);

// --- embedded operators -----------------------------------------------------

// Columns P(x) e_i / sqrt(w): diffusion vectors of the projected frame SDE.
// w is the ambient inner product weight, <u,v> = w u.v (1 for vector
// manifolds, 1/2 for flattened matrix manifolds with the half-trace pairing).
Mat pseudo_frame(const ProjectionField& proj, const Vec& x, double ambient_weight = 1.0);

// II(X,Y) = (I - P(x)) D_X [y -> P(y) Y](x): the normal part of the ambient
// derivative of the projected extension of Y.
Vec second_fundamental_form(const ProjectionField& proj, const Vec& x, const Vec& X,
                            const Vec& Y, double h = kFdStep);

// H = sum_i II(P eb_i, P eb_i) over an ambient orthonormal basis eb_i = e_i/sqrt(w).
Vec mean_curvature_numeric(const ProjectionField& proj, const Vec& x,
                           double ambient_weight = 1.0, double h = kFdStep);

// Delta f = (1/w) tr(Hess_flat(f) P(x)) + H . grad_flat(f).
double laplace_beltrami_embedded(const ScalarField& f, const ProjectionField& proj,
                                 const Vec& mean_curv, const Vec& x,
                                 double ambient_weight = 1.0,
                                 double h = kFdStepSecond);

}  // namespace rbm
