#pragma once

// Twistor space of an oriented Riemannian four-manifold.
//
// Twistor constructions use negatively oriented orthonormal frames: when the base
// orientation is +1 the fourth frame vector is reversed first (twistor_frame), and in
// that frame the relevant 2-forms are the pattern e12 + e34, e13 + e42, e14 + e23.
// The fiber over a point is the unit sphere in that 3-space, with reference point
// n0 = (1, 0, 0) and stereographic coordinates (u, v) from the pole -n0.

#include "tcurv/blocks.hpp"
#include "tcurv/geom.hpp"
#include "tcurv/metric.hpp"

#include <Eigen/Core>

#include <vector>

namespace tcurv {

struct QTensors {
    Eigen::Matrix4d q2 = Eigen::Matrix4d::Zero(); // R_12ab + R_34ab
    Eigen::Matrix4d q3 = Eigen::Matrix4d::Zero(); // R_13ab + R_42ab
    Eigen::Matrix4d q4 = Eigen::Matrix4d::Zero(); // R_14ab + R_23ab
    double norm2_sq = 0.0;
    double norm3_sq = 0.0;
    double norm4_sq = 0.0;
};

/// Riemann components in a negatively oriented frame of a base with the given orientation.
Tensor twistor_frame(const Tensor& riemann, int orientation);

QTensors q_tensors(const Tensor& riemann);
QTensors q_tensors(const CurvatureData& curv);

/// S + 2/t^2 - (t^2/4)(|q3|^2 + |q4|^2)
double twistor_scalar(double S, const QTensors& q, double t);

struct FiberPoint {
    Eigen::Vector3d n;
    FrameRotation rotation; // a_plus carries n0 to n, a_minus = I
};

FiberPoint fiber_point(const Eigen::Vector3d& n);
/// Unit vector for stereographic coordinates (u, v).
Eigen::Vector3d stereographic_point(double u, double v);
/// Deterministic near-uniform sample of the unit sphere.
std::vector<Eigen::Vector3d> fibonacci_sphere(int samples);

struct FiberSample {
    FiberPoint point;
    double scalar = 0.0;
};

struct FiberScan {
    std::vector<FiberSample> samples;
    // Extremes are refined by a local search started from the extreme samples.
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double spread = 0.0;
    bool constant = false;
};

/// Twistor scalar curvature over the fiber above the point where curv was taken.
FiberScan fiber_scan(const CurvatureData& curv, int orientation, double t, int samples = 64, double tol = 1e-7);

struct OneillTensor {
    Tensor components; // A(p, q, r) = A^p_qr, 6-dimensional frame indices
    double max_abs = 0.0;
};

/// O'Neill integrability tensor at one fiber point.
OneillTensor oneill_tensor(const CurvatureData& curv, int orientation, double t,
                           const Eigen::Vector3d& n = Eigen::Vector3d::UnitX());

struct OneillVerdict {
    double max_abs = 0.0; // over the fiber samples
    bool integrable = false;
};

OneillVerdict oneill_scan(const CurvatureData& curv, int orientation, double t, int samples = 64,
                          double tol = 1e-8);

/// Fiber metric weight; the fiber is then a round sphere of radius t.
inline constexpr double kVerticalScale = 1.0;

struct TwistorChart {
    MetricField base;
    double t = 1.0;
    MetricField chart; // coordinates: base coordinates, then u, v
    const char* fiber_parametrization = "stereographic from -n0";
};

TwistorChart build_twistor_chart(const MetricField& base, double t);

/// Base point and fiber coordinates combined into a chart point.
ChartPoint chart_point(const ChartPoint& base_point, double u, double v);

struct TwistorRicci {
    Eigen::MatrixXd ricci;
    double scalar_engine = 0.0;
    double einstein_residual = 0.0;      // max |Ric - (S/6) g|
    double ricci_parallel_residual = 0.0; // |nabla Ric|
    double totally_geodesic_residual = 0.0;
    double oneill_norm_sq = 0.0; // sum of squared horizontal-horizontal-vertical connection components
    bool accuracy_warning = false;
};

TwistorRicci twistor_ricci_analysis(const TwistorChart& chart, const ChartPoint& p6, double h = 1e-4,
                                    bool with_derivative = true);

struct IdentityResiduals {
    double weyl_minus_norm = 0.0;  // |W-|^2 - (|q2|^2 + |q3|^2 + |q4|^2 - S^2/12), tensor norms
    double einstein_q = 0.0;       // |q3|^2 - 4 A22^2 and |q4|^2 - 4 A33^2 in the diagonalizing frame
    bool einstein_applicable = false;
    double scalar_cross = 0.0; // formula vs. six-dimensional engine at (u, v) = (0, 0)
    double scalar_formula = 0.0;
    double scalar_engine = 0.0;
};

IdentityResiduals verify_identities(const MetricField& m, const ChartPoint& p, double t, double tol = 1e-9);

} // namespace tcurv
