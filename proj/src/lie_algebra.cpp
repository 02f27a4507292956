#include "rbm/lie_algebra.hpp"

#include <cmath>

namespace rbm {

Vec flatten(const Mat& m) {
    Vec v(m.rows() * m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
    return v;
}

Mat unflatten(const Vec& v, int k) {
    Mat m(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) m(i, j) = v(i * k + j);
    return m;
}

double LieAlgebraBasis::inner(const Vec& a, const Vec& b) const {
    return inner_weight * a.dot(b);
}

double LieAlgebraBasis::norm(const Vec& a) const { return std::sqrt(inner(a, a)); }

Vec LieAlgebraBasis::coeffs(const Vec& v) const {
    Vec c(dim);
    for (int i = 0; i < dim; ++i) c(i) = inner(elements[i], v);
    return c;
}

Vec LieAlgebraBasis::from_coeffs(const Vec& c) const {
    Vec v = Vec::Zero(elements[0].size());
    for (int i = 0; i < dim; ++i) v += c(i) * elements[i];
    return v;
}

Mat LieAlgebraBasis::element_matrix(int i) const {
    return unflatten(elements[i], matrix_size);
}

namespace {

void check_orthonormal(const LieAlgebraBasis& b, double tol) {
    for (int i = 0; i < b.dim; ++i)
        for (int j = i; j < b.dim; ++j) {
            double want = i == j ? 1.0 : 0.0;
            if (std::abs(b.inner(b.elements[i], b.elements[j]) - want) > tol)
                throw UsageError("algebra basis is not orthonormal in its pairing");
        }
}

}  // namespace

LieAlgebraBasis LieAlgebraBasis::matrix_basis(const std::vector<Mat>& elems,
                                              double inner_weight, double tol) {
    if (elems.empty()) throw UsageError("empty algebra basis");
    LieAlgebraBasis b;
    b.dim = static_cast<int>(elems.size());
    b.matrix_size = static_cast<int>(elems[0].rows());
    b.inner_weight = inner_weight;
    for (const Mat& e : elems) {
        if (e.rows() != b.matrix_size || e.cols() != b.matrix_size)
            throw UsageError("algebra basis elements differ in shape");
        b.elements.push_back(flatten(e));
    }
    int k = b.matrix_size;
    b.bracket = [k](const Vec& a, const Vec& c) {
        Mat ma = unflatten(a, k), mc = unflatten(c, k);
        return flatten(ma * mc - mc * ma);
    };
    check_orthonormal(b, tol);
    return b;
}

LieAlgebraBasis LieAlgebraBasis::vector_basis(const std::vector<Vec>& elems,
                                              BracketFn bracket, double inner_weight,
                                              double tol) {
    if (elems.empty()) throw UsageError("empty algebra basis");
    LieAlgebraBasis b;
    b.dim = static_cast<int>(elems.size());
    b.matrix_size = 0;
    b.inner_weight = inner_weight;
    b.elements = elems;
    b.bracket = std::move(bracket);
    check_orthonormal(b, tol);
    return b;
}

StructureConstants structure_constants(const LieAlgebraBasis& basis,
                                       double closure_tol) {
    int n = basis.dim;
    StructureConstants sc;
    sc.c.assign(n, Mat::Zero(n, n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Vec br = basis.bracket(basis.elements[i], basis.elements[j]);
            Vec c = basis.coeffs(br);
            // the bracket must close onto the span
            Vec rem = br - basis.from_coeffs(c);
            if (basis.norm(rem) > closure_tol)
                throw UsageError("bracket leaves the basis span; not a subalgebra");
            for (int k = 0; k < n; ++k) sc.c[k](i, j) = c(k);
        }
    return sc;
}

double jacobi_residual(const StructureConstants& cs) {
    int n = cs.dim();
    auto ad = [&cs, n](const Vec& eta, const Vec& xi) {
        Vec out = Vec::Zero(n);
        for (int k = 0; k < n; ++k) out(k) = eta.dot(cs.c[k] * xi);
        return out;
    };
    double worst = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                Vec ei = Vec::Unit(n, i), ej = Vec::Unit(n, j), ek = Vec::Unit(n, k);
                Vec r = ad(ei, ad(ej, ek)) + ad(ej, ad(ek, ei)) + ad(ek, ad(ei, ej));
                worst = std::max(worst, r.norm());
            }
    return worst;
}

Mat ad_matrix(const StructureConstants& cs, const Vec& eta) {
    int n = cs.dim();
    Mat ad(n, n);
    for (int k = 0; k < n; ++k) ad.row(k) = eta.transpose() * cs.c[k];
    return ad;
}

Vec coad_apply(const StructureConstants& cs, const Vec& xi, const Vec& alpha) {
    return ad_matrix(cs, xi).transpose() * alpha;
}

Vec canonical_drift(const StructureConstants& cs) {
    int n = cs.dim();
    // J_k = sum_i c^i_ik, cross-checked against sum_i ad*_{e_i} e_i
    Vec j(n);
    for (int k = 0; k < n; ++k) {
        double s = 0;
        for (int i = 0; i < n; ++i) s += cs.c[i](i, k);
        j(k) = s;
    }
    Vec check = Vec::Zero(n);
    for (int i = 0; i < n; ++i) {
        Vec ei = Vec::Unit(n, i);
        check += coad_apply(cs, ei, ei);
    }
    if ((j - check).norm() > 1e-12 * (1.0 + j.norm()))
        throw Error("canonical drift routes disagree");
    return j;
}

bool is_unimodular(const StructureConstants& cs, double tol) {
    return canonical_drift(cs).norm() <= tol;
}

Vec left_invariant_covariant(const StructureConstants& cs, const Vec& eta,
                             const Vec& xi) {
    Vec br = ad_matrix(cs, eta) * xi;
    return 0.5 * (br - coad_apply(cs, eta, xi) - coad_apply(cs, xi, eta));
}

}  // namespace rbm
