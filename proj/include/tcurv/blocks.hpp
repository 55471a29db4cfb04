#pragma once

// Four-dimensional curvature: Hodge star, the Lambda+/Lambda- splitting, the 3x3
// blocks of the curvature operator and the SO(4) -> SO(3) x SO(3) covering.
//
// 2-forms are 4x4 antisymmetric coefficient matrices eta = 1/2 eta_ij w^i ^ w^j in
// the orthonormal coframe, with <a, b> = 1/2 sum a_ij b_ij. The curvature operator
// acts as R(eta)_ij = 1/2 R_ijkl eta_kl. Basis forms are not normalized; block entries
// are M_pq = <R(eta_q), eta_p> / <eta_p, eta_p>, so constant curvature gives (S/12) I.

#include "tcurv/geom.hpp"

#include <Eigen/Core>

#include <array>
#include <string>

namespace tcurv {

using TwoForm = Eigen::Matrix4d;

/// (*eta)_ij = 1/2 eps_ijkl eta_kl with eps_1234 = orientation.
TwoForm hodge_star(const TwoForm& eta, int orientation);
double inner(const TwoForm& a, const TwoForm& b);
/// w^i ^ w^j as a coefficient matrix (0-based indices).
TwoForm wedge(int i, int j);

/// The pattern e12 + s e34, e13 + s e42, e14 + s e23 for s = +1 or -1.
std::array<TwoForm, 3> pattern_basis(int s);

struct TwoFormBasis {
    int orientation = 1;
    std::array<TwoForm, 3> plus;  // *eta = eta
    std::array<TwoForm, 3> minus; // *eta = -eta
};

TwoFormBasis lambda_bases(int orientation);

/// R(eta) for a rank-4 frame tensor R in dimension 4.
TwoForm apply_curvature(const Tensor& riemann, const TwoForm& eta);

struct BlockData {
    Eigen::Matrix3d A; // Lambda+ -> Lambda+
    Eigen::Matrix3d B; // Lambda+ -> Lambda-
    Eigen::Matrix3d C; // Lambda- -> Lambda-
    double S = 0.0;
    int orientation = 1;
    std::string basis_convention = "pattern/unnormalized";

    /// [[A, B^T], [B, C]]
    Eigen::Matrix<double, 6, 6> assembled() const;
    double max_entry() const;
};

BlockData curvature_blocks(const CurvatureData& curv, int orientation);

struct Classification {
    bool einstein = false;
    bool self_dual = false;      // W- = 0
    bool anti_self_dual = false; // W+ = 0
    bool weyl_flat = false;
    double einstein_residual = 0.0;       // max |B|
    double self_dual_residual = 0.0;      // max |C - S/12 I|
    double anti_self_dual_residual = 0.0; // max |A - S/12 I|
};

/// Each predicate compares its residual with tol * (1 + max |M|).
Classification classify(const BlockData& blocks, double tol = 1e-9);

struct FrameRotation {
    Eigen::Matrix4d a;
    Eigen::Matrix3d a_plus;
    Eigen::Matrix3d a_minus;
};

/// Induced action of a in SO(4) on the Lambda+ and Lambda- bases: a eta_p a^T = sum_r mu(r,p) eta_r.
FrameRotation mu_homomorphism(const Eigen::Matrix4d& a, int orientation = 1);

/// A preimage of (r, I) under mu for the pattern-(+1) family, i.e. an element of
/// SO(4) acting on e12 + e34, e13 + e42, e14 + e23 by the rotation r and trivially
/// on the other family.
Eigen::Matrix4d pattern_lift(const Eigen::Matrix3d& r);

/// Blocks in the frame rotated by rot.a: A -> a+^T A a+, B -> a-^T B a+, C -> a-^T C a-.
BlockData rotate_blocks(const BlockData& blocks, const FrameRotation& rot);

/// Eigenvalues of a symmetric 3x3 matrix in descending order.
Eigen::Vector3d symmetric_eigenvalues(const Eigen::Matrix3d& m);

struct SpectralReport {
    Eigen::Vector3d weyl_minus_eigen = Eigen::Vector3d::Zero();
    double weyl_minus_det = 0.0;
    Eigen::Vector3d weyl_plus_eigen = Eigen::Vector3d::Zero();
    double weyl_minus_norm = 0.0; // operator convention: sum of squared eigenvalues
    double laplacian_term = 0.0;  // 1/2 Laplacian |W-|^2
    double gradient_term = 0.0;   // |nabla W-|^2
    double bochner_residual = 0.0;
    double derdzinski_factor = 0.0;
    bool accuracy_warning = false;
    std::string norm_convention = "operator";
};

/// Algebraic part only: eigenvalues, determinant and the Derdzinski factor.
SpectralReport spectral_summary(const BlockData& blocks);

/// Adds the Bochner-Weitzenbock residual
/// 1/2 Lap|W-|^2 - |nabla W-|^2 - (S/2)|W-|^2 + 18 det W-, derivatives by finite differences.
SpectralReport spectral_report(const MetricField& m, const ChartPoint& p, int orientation, double h = 1e-4,
                               double h_laplacian = 3e-3);

} // namespace tcurv
