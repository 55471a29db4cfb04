#pragma once

// Chart-local curvature by Cartan's structure equations.
//
// Conventions: omega^i = b^i_a dx^a with g = b^T b; connection forms satisfy
// d omega^i = -omega^i_j ^ omega^j and are stored as omega^i_j = w(i,j,k) omega^k;
// Omega^i_j = d omega^i_j + omega^i_k ^ omega^k_j = 1/2 R(i,j,k,l) omega^k ^ omega^l.
// With these signs the unit round sphere has sectional curvature +1.

#include "tcurv/jet.hpp"
#include "tcurv/metric.hpp"

#include <Eigen/Core>

#include <cassert>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace tcurv {

/// Dense tensor of frame components with `rank` indices ranging over 0..dim-1.
template <class Scalar>
class FrameTensor {
public:
    FrameTensor() = default;
    FrameTensor(int dim, int rank, const Scalar& fill = Scalar(0.0))
        : dim_(dim), rank_(rank), data_(count(dim, rank), fill) {}

    int dim() const noexcept { return dim_; }
    int rank() const noexcept { return rank_; }
    std::size_t size() const noexcept { return data_.size(); }

    template <class... I>
    Scalar& operator()(I... idx) { return data_[offset(idx...)]; }
    template <class... I>
    const Scalar& operator()(I... idx) const { return data_[offset(idx...)]; }

    Scalar& at(std::span<const int> idx) { return data_[offset_of(idx)]; }
    const Scalar& at(std::span<const int> idx) const { return data_[offset_of(idx)]; }

    std::vector<Scalar>& data() noexcept { return data_; }
    const std::vector<Scalar>& data() const noexcept { return data_; }

    /// Decodes a flat offset into its multi-index.
    std::vector<int> index_of(std::size_t flat) const
    {
        std::vector<int> idx(rank_);
        for (int r = rank_ - 1; r >= 0; --r) {
            idx[r] = static_cast<int>(flat % dim_);
            flat /= dim_;
        }
        return idx;
    }

private:
    static std::size_t count(int dim, int rank)
    {
        std::size_t n = 1;
        for (int r = 0; r < rank; ++r) n *= static_cast<std::size_t>(dim);
        return n;
    }

    template <class... I>
    std::size_t offset(I... idx) const
    {
        assert(sizeof...(I) == static_cast<std::size_t>(rank_));
        std::size_t o = 0;
        ((o = o * dim_ + static_cast<std::size_t>(idx)), ...);
        return o;
    }

    std::size_t offset_of(std::span<const int> idx) const
    {
        std::size_t o = 0;
        for (int i : idx) o = o * dim_ + static_cast<std::size_t>(i);
        return o;
    }

    int dim_ = 0;
    int rank_ = 0;
    std::vector<Scalar> data_;
};

using Tensor = FrameTensor<double>;
using JetTensor = FrameTensor<Jet>;

double max_abs(const Tensor& t);
double squared_norm(const Tensor& t);
Tensor operator-(const Tensor& a, const Tensor& b);
Tensor values(const JetTensor& t);

struct CoframeData {
    JetMatrix b;     // row i: omega^i = b(i, a) dx^a
    JetMatrix b_inv; // column j: e_j = b_inv(a, j) d/dx^a
    int dim() const { return static_cast<int>(b.rows()); }
};

struct ConnectionForms {
    JetTensor c;     // d omega^i = 1/2 c(i,j,k) omega^j ^ omega^k
    JetTensor omega; // omega^i_j = omega(i,j,k) omega^k
    JetTensor gamma; // omega^i_j = gamma(i,j,a) dx^a
};

struct CurvatureData {
    int dim = 0;
    Tensor riemann;
    Eigen::MatrixXd ricci;
    double scalar = 0.0;
    Eigen::MatrixXd traceless_ricci;
    Tensor weyl;
    std::optional<double> einstein_constant;
    double einstein_residual = 0.0; // max |E|
    std::optional<double> cov_riemann_norm;
    std::optional<double> cov_weyl_minus_norm;
};

/// Component jets of g at `p` carrying all partials up to `order`.
JetMatrix metric_jets(const MetricField& m, const ChartPoint& p, int order);
CoframeData orthonormal_coframe(const JetMatrix& g);
ConnectionForms connection_forms(const CoframeData& coframe);
/// Omega(i,j,k,l) = Omega^i_j(e_k, e_l).
Tensor curvature_forms(const CoframeData& coframe, const ConnectionForms& conn);
CurvatureData riemann_components(const Tensor& curvature_forms);
CurvatureData ricci_scalar_weyl(CurvatureData curv, double tol = 1e-9);

Tensor kulkarni_nomizu(const Eigen::MatrixXd& h, const Eigen::MatrixXd& k);

/// Every stage of the computation at one point.
struct Geometry {
    JetMatrix g;
    CoframeData coframe;
    ConnectionForms conn;
    CurvatureData curv;
};

Geometry analyze(const MetricField& m, const ChartPoint& p, double tol = 1e-9);
CurvatureData curvature_at(const MetricField& m, const ChartPoint& p, double tol = 1e-9);

/// Sign of the permutation idx of (0..n-1), 0 if idx repeats.
int permutation_sign(std::span<const int> idx);
/// Components in the rotated frame e~_i = e_p a(p,i): result(i,j,..) = a(p,i) a(q,j) .. t(p,q,..).
Tensor rotate(const Tensor& t, const Eigen::MatrixXd& a);

struct InvariantResiduals {
    double antisymmetry = 0.0;  // R_ijkl + R_jikl and R_ijkl + R_ijlk
    double pair_symmetry = 0.0; // R_ijkl - R_klij
    double bianchi = 0.0;
    double reconstruction = 0.0;
    double weyl_trace = 0.0;
    double worst() const;
};

/// Residuals relative to (1 + max |R|).
InvariantResiduals curvature_invariants(const CurvatureData& curv);

/// max |d omega^i + omega^i_j ^ omega^j| in coordinates, relative to 1 + max |d omega^i|.
double first_structure_residual(const CoframeData& coframe, const ConnectionForms& conn);
/// max |d omega^i_j + omega^i_k ^ omega^k_j - Omega^i_j| relative to 1 + max |R|, with
/// d omega^i_j taken by Richardson-extrapolated finite differences of the connection
/// coefficients.
double second_structure_residual(const MetricField& m, const ChartPoint& p, double h = 1e-4);

using TensorField = std::function<Tensor(const ChartPoint&)>;

struct CovariantDerivative {
    Tensor value; // rank + 1; the last index is the differentiation direction
    double disagreement = 0.0;
    bool accuracy_warning = false;
};

/// Frame components of nabla T for a tensor field given in the orthonormal frame of m.
CovariantDerivative covariant_derivative(const MetricField& m, const ChartPoint& p, const TensorField& field,
                                         double h = 1e-4);

struct CovariantCurvature {
    Tensor nabla_riemann;
    double riemann_norm = 0.0;         // |nabla Riem|^2, full contraction
    Tensor nabla_weyl_minus;           // dim 4 only
    double weyl_minus_norm = 0.0;      // |nabla W-|^2, full contraction
    bool accuracy_warning = false;
};

/// Anti-self-dual part of an algebraic curvature tensor in dimension 4.
Tensor anti_self_dual_part(const Tensor& w, int orientation);

CovariantCurvature covariant_derivative_curvature(const MetricField& m, const ChartPoint& p, double h = 1e-4);

/// Laplace-Beltrami operator of a scalar field by finite differences.
double laplacian(const MetricField& m, const ChartPoint& p, const std::function<double(const ChartPoint&)>& f,
                 double h = 1e-3);

} // namespace tcurv
