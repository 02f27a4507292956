// Lie algebra bases with orthonormality-checked structure constants, adjoint
// and coadjoint operators, the canonical drift J, and the left-invariant
// Levi-Civita covariant derivative in algebra coordinates.
//
// Elements are stored as flat vectors: row-major flattened k x k matrices for
// matrix algebras, plain coordinate vectors otherwise. The coadjoint identity
// ad*_xi = (ad_xi)^T is valid only in an orthonormal basis, which the
// constructor asserts.
#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "rbm/geometry.hpp"

namespace rbm {

Vec flatten(const Mat& m);          // row-major
Mat unflatten(const Vec& v, int k);  // row-major, k x k

using BracketFn = std::function<Vec(const Vec&, const Vec&)>;

struct LieAlgebraBasis {
    int dim = 0;          // number of basis elements
    int matrix_size = 0;  // k when elements are flattened k x k matrices, else 0
    double inner_weight = 1.0;  // <u,v> = inner_weight * u.dot(v)
    std::vector<Vec> elements;
    BracketFn bracket;  // matrix algebras default to the commutator

    double inner(const Vec& a, const Vec& b) const;
    double norm(const Vec& a) const;
    // Orthonormal expansion coefficients of v in this basis.
    Vec coeffs(const Vec& v) const;
    Vec from_coeffs(const Vec& c) const;
    Mat element_matrix(int i) const;

    // Throws UsageError unless the elements are orthonormal to tol.
    static LieAlgebraBasis matrix_basis(const std::vector<Mat>& elems,
                                        double inner_weight,
                                        double tol = 1e-12);
    static LieAlgebraBasis vector_basis(const std::vector<Vec>& elems,
                                        BracketFn bracket,
                                        double inner_weight = 1.0,
                                        double tol = 1e-12);
};

// c[k](i,j) = c^k_ij with [e_i, e_j] = sum_k c^k_ij e_k.
struct StructureConstants {
    std::vector<Mat> c;

    int dim() const { return static_cast<int>(c.size()); }
};

// Verifies closure of the bracket to closure_tol before returning the table.
StructureConstants structure_constants(const LieAlgebraBasis& basis,
                                       double closure_tol = 1e-10);

// max over basis triples of |[[e_i,e_j],e_k] + cyclic| in coefficient norm.
double jacobi_residual(const StructureConstants& cs);

// (ad_eta)^k_j = sum_i eta^i c^k_ij, acting on coefficient vectors.
Mat ad_matrix(const StructureConstants& cs, const Vec& eta);

// ad*_xi alpha = (ad_xi)^T alpha (orthonormal basis).
Vec coad_apply(const StructureConstants& cs, const Vec& xi, const Vec& alpha);

// J = sum_i ad*_{e_i} e_i, i.e. J_k = sum_i c^i_ik. Cross-checked against the
// operator route internally; <J, eta> = -tr(ad_eta) for all eta.
Vec canonical_drift(const StructureConstants& cs);

bool is_unimodular(const StructureConstants& cs, double tol = 1e-12);

// nabla_eta xi = 1/2 ([eta,xi] - ad*_eta xi - ad*_xi eta) in algebra coords;
// in particular nabla_{e_i} e_i = -ad*_{e_i} e_i.
Vec left_invariant_covariant(const StructureConstants& cs, const Vec& eta,
                             const Vec& xi);

}  // namespace rbm
