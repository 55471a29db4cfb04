#include "tcurv/blocks.hpp"

#include "tcurv/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>

namespace tcurv {

namespace {

void require_antisymmetric(const TwoForm& eta)
{
    if ((eta + eta.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + eta.cwiseAbs().maxCoeff()))
        throw DomainError("2-form coefficients must be antisymmetric");
}

void require_orientation(int o)
{
    if (o != 1 && o != -1) throw DomainError("orientation must be +1 or -1");
}

} // namespace

TwoForm hodge_star(const TwoForm& eta, int orientation)
{
    require_orientation(orientation);
    require_antisymmetric(eta);
    TwoForm out = TwoForm::Zero();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k)
                for (int l = 0; l < 4; ++l) {
                    const std::array<int, 4> idx{i, j, k, l};
                    out(i, j) += 0.5 * orientation * permutation_sign(idx) * eta(k, l);
                }
    return out;
}

double inner(const TwoForm& a, const TwoForm& b) { return 0.5 * a.cwiseProduct(b).sum(); }

TwoForm wedge(int i, int j)
{
    TwoForm w = TwoForm::Zero();
    w(i, j) = 1.0;
    w(j, i) = -1.0;
    return w;
}

std::array<TwoForm, 3> pattern_basis(int s)
{
    return {wedge(0, 1) + s * wedge(2, 3), wedge(0, 2) + s * wedge(3, 1), wedge(0, 3) + s * wedge(1, 2)};
}

TwoFormBasis lambda_bases(int orientation)
{
    require_orientation(orientation);
    return {orientation, pattern_basis(orientation), pattern_basis(-orientation)};
}

TwoForm apply_curvature(const Tensor& R, const TwoForm& eta)
{
    if (R.dim() != 4 || R.rank() != 4) throw DimensionError("curvature operator needs a 4-dimensional tensor");
    TwoForm out = TwoForm::Zero();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k)
                for (int l = 0; l < 4; ++l) out(i, j) += 0.5 * R(i, j, k, l) * eta(k, l);
    return out;
}

Eigen::Matrix<double, 6, 6> BlockData::assembled() const
{
    Eigen::Matrix<double, 6, 6> M;
    M << A, B.transpose(), B, C;
    return M;
}

double BlockData::max_entry() const { return assembled().cwiseAbs().maxCoeff(); }

BlockData curvature_blocks(const CurvatureData& curv, int orientation)
{
    if (curv.dim != 4) throw DimensionError("curvature blocks need dimension 4");
    const TwoFormBasis basis = lambda_bases(orientation);
    auto block = [&](const std::array<TwoForm, 3>& rows, const std::array<TwoForm, 3>& cols) {
        Eigen::Matrix3d M;
        for (int q = 0; q < 3; ++q) {
            const TwoForm image = apply_curvature(curv.riemann, cols[q]);
            for (int p = 0; p < 3; ++p) M(p, q) = inner(image, rows[p]) / inner(rows[p], rows[p]);
        }
        return M;
    };
    BlockData b;
    b.A = block(basis.plus, basis.plus);
    b.B = block(basis.minus, basis.plus);
    b.C = block(basis.minus, basis.minus);
    b.S = curv.scalar;
    b.orientation = orientation;
    return b;
}

Classification classify(const BlockData& blocks, double tol)
{
    Classification c;
    const double bound = tol * (1.0 + blocks.max_entry());
    const Eigen::Matrix3d scalar_part = (blocks.S / 12.0) * Eigen::Matrix3d::Identity();
    c.einstein_residual = blocks.B.cwiseAbs().maxCoeff();
    c.self_dual_residual = (blocks.C - scalar_part).cwiseAbs().maxCoeff();
    c.anti_self_dual_residual = (blocks.A - scalar_part).cwiseAbs().maxCoeff();
    c.einstein = c.einstein_residual <= bound;
    c.self_dual = c.self_dual_residual <= bound;
    c.anti_self_dual = c.anti_self_dual_residual <= bound;
    c.weyl_flat = c.self_dual && c.anti_self_dual;
    return c;
}

FrameRotation mu_homomorphism(const Eigen::Matrix4d& a, int orientation)
{
    require_orientation(orientation);
    if ((a.transpose() * a - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() > 1e-10)
        throw DomainError("frame rotation is not orthogonal");
    if (a.determinant() < 0.0) throw DomainError("frame rotation reverses orientation");
    const TwoFormBasis basis = lambda_bases(orientation);
    auto induced = [&a](const std::array<TwoForm, 3>& eta) {
        Eigen::Matrix3d mu;
        for (int p = 0; p < 3; ++p) {
            const TwoForm image = a * eta[p] * a.transpose();
            for (int r = 0; r < 3; ++r) mu(r, p) = inner(image, eta[r]) / inner(eta[r], eta[r]);
        }
        return mu;
    };
    return {a, induced(basis.plus), induced(basis.minus)};
}

Eigen::Matrix4d pattern_lift(const Eigen::Matrix3d& r)
{
    if ((r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-10 || r.determinant() < 0.0)
        throw DomainError("lift needs a rotation matrix");
    // exp(theta eta_p) induces the rotation by -2 theta about axis p, so the unit
    // quaternion (w, x) of r lifts to w I - sum x_p eta_p.
    const Eigen::Quaterniond q(r);
    const auto eta = pattern_basis(1);
    return q.w() * Eigen::Matrix4d::Identity() - q.x() * eta[0] - q.y() * eta[1] - q.z() * eta[2];
}

BlockData rotate_blocks(const BlockData& blocks, const FrameRotation& rot)
{
    BlockData out = blocks;
    out.A = rot.a_plus.transpose() * blocks.A * rot.a_plus;
    out.B = rot.a_minus.transpose() * blocks.B * rot.a_plus;
    out.C = rot.a_minus.transpose() * blocks.C * rot.a_minus;
    return out;
}

Eigen::Vector3d symmetric_eigenvalues(const Eigen::Matrix3d& m)
{
    const Eigen::Matrix3d sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(sym, Eigen::EigenvaluesOnly);
    const Eigen::Vector3d ascending = solver.eigenvalues();
    return ascending.reverse();
}

SpectralReport spectral_summary(const BlockData& blocks)
{
    SpectralReport r;
    const Eigen::Matrix3d shift = (blocks.S / 12.0) * Eigen::Matrix3d::Identity();
    const Eigen::Matrix3d wm = blocks.C - shift;
    r.weyl_minus_eigen = symmetric_eigenvalues(wm);
    r.weyl_plus_eigen = symmetric_eigenvalues(blocks.A - shift);
    r.weyl_minus_det = r.weyl_minus_eigen.prod();
    r.weyl_minus_norm = r.weyl_minus_eigen.squaredNorm();
    r.derdzinski_factor = std::cbrt(24.0 * r.weyl_minus_norm);
    return r;
}

SpectralReport spectral_report(const MetricField& m, const ChartPoint& p, int orientation, double h,
                               double h_laplacian)
{
    require_orientation(orientation);
    const MetricField oriented = m.with_orientation(orientation);
    const BlockData blocks = curvature_blocks(curvature_at(oriented, p), orientation);
    SpectralReport r = spectral_summary(blocks);

    const CovariantCurvature cov = covariant_derivative_curvature(oriented, p, h);
    // Tensor contraction counts every 2-form component twice in each pair slot.
    r.gradient_term = 0.25 * cov.weyl_minus_norm;
    auto norm_field = [&oriented, orientation](const ChartPoint& q) {
        return spectral_summary(curvature_blocks(curvature_at(oriented, q), orientation)).weyl_minus_norm;
    };
    // Richardson step cancels the O(h^2) stencil error.
    const double lap_h = laplacian(oriented, p, norm_field, h_laplacian);
    const double lap_2h = laplacian(oriented, p, norm_field, 2.0 * h_laplacian);
    r.laplacian_term = 0.5 * (4.0 * lap_h - lap_2h) / 3.0;
    r.accuracy_warning = cov.accuracy_warning;
    r.bochner_residual =
        r.laplacian_term - r.gradient_term - 0.5 * blocks.S * r.weyl_minus_norm + 18.0 * r.weyl_minus_det;
    return r;
}

} // namespace tcurv
