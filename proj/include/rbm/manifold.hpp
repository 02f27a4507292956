// Manifold catalog: immutable descriptors bundling whichever of the chart,
// embedded, and group capabilities the manifold supports, plus closed-form
// geometry where available. Analytic components take precedence over numeric
// recomputation and are cross-validated against it in the test suite.
#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "rbm/geometry.hpp"
#include "rbm/lie_algebra.hpp"

namespace rbm {

enum class Backend { chart, embedded, group };

std::string to_string(Backend b);
Backend backend_from_string(const std::string& s);

struct ManifoldDescriptor {
    std::string name;
    int dim = 0;        // intrinsic dimension n
    int state_dim = 0;  // chart: n; embedded/matrix group: flattened ambient size
    int matrix_size = 0;  // k when states are flattened k x k matrices, else 0
    Backend default_backend = Backend::chart;
    std::vector<Backend> backends;
    std::map<std::string, double> params;
    Vec default_start;

    // chart capability
    MetricField metric;
    std::function<ChristoffelSymbols(const Vec&)> christoffel;  // analytic, optional
    FrameField frame;
    VectorFieldFn stratonovich_drift;  // -1/2 sum_i nabla_{E_i}E_i, optional value
    std::function<bool(const Vec&)> chart_valid;  // empty: everywhere valid
    bool positivity_retry = false;  // halve dt on domain exits (upper half space)

    // embedded capability
    ProjectionField projection;
    double ambient_weight = 1.0;
    std::function<Vec(const Vec&)> mean_curvature;  // analytic, optional
    std::function<Vec(const Vec&)> retraction;
    std::function<double(const Vec&)> constraint_residual;

    // group capability
    std::shared_ptr<const LieAlgebraBasis> algebra;
    std::shared_ptr<const StructureConstants> structure;
    // state * exp(sum_i c_i e_i) through the group's closed-form exponential.
    std::function<Vec(const Vec&, const Vec&)> group_translate;
    // Closed-form realizations in state coordinates (numeric differentiation of
    // group_translate is the fallback): columns g e_i, and the ito drift
    // g (mat(J)/2 + 1/2 sum_i e_i^2).
    FrameField group_frame;
    std::function<Vec(const Vec&)> group_ito_drift;

    bool has(Backend b) const;
    // Chart backends: box predicate. Embedded/group: residual <= tol.
    bool valid_state(const Vec& x, double tol = 1e-8) const;
    // 0 for chart states inside the box, constraint residual otherwise.
    double residual(const Vec& x) const;
};

using ManifoldPtr = std::shared_ptr<const ManifoldDescriptor>;

// Catalog constructors. Parameters are validated (R > r > 0, n >= 2, ...).
ManifoldPtr make_sphere2_chart();
ManifoldPtr make_torus2_chart(double R = 2.0, double r = 1.0);
ManifoldPtr make_torus2_group(double R = 2.0, double r = 1.0);
ManifoldPtr make_hyperbolic(int n = 2);
ManifoldPtr make_sphere_embedded(int n = 2);
ManifoldPtr make_so3();
ManifoldPtr make_aff_line();

std::vector<std::string> catalog_names();
// Lookup by catalog name with parameter overrides ("n", "R", "r").
ManifoldPtr make_manifold(const std::string& name,
                          const std::map<std::string, double>& params = {});

// Closed-form exponentials.
Eigen::Matrix3d hat_so3(const Eigen::Vector3d& w);
Eigen::Matrix3d rodrigues_exp(const Eigen::Vector3d& w);
Eigen::Matrix2d aff_exp(double u, double v);
// Polar factor of a square matrix (SVD route, det-positive branch).
Mat polar_factor(const Mat& m);

}  // namespace rbm
