#include "tcurv/twistor.hpp"

#include "tcurv/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

namespace tcurv {

Tensor twistor_frame(const Tensor& riemann, int orientation)
{
    if (riemann.dim() != 4) throw DimensionError("twistor constructions need dimension 4");
    if (orientation == -1) return riemann;
    if (orientation != 1) throw DomainError("orientation must be +1 or -1");
    return rotate(riemann, Eigen::Vector4d(1.0, 1.0, 1.0, -1.0).asDiagonal().toDenseMatrix());
}

QTensors q_tensors(const Tensor& R)
{
    if (R.dim() != 4 || R.rank() != 4) throw DimensionError("q-tensors need 4-dimensional curvature");
    QTensors q;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            q.q2(a, b) = R(0, 1, a, b) + R(2, 3, a, b);
            q.q3(a, b) = R(0, 2, a, b) + R(3, 1, a, b);
            q.q4(a, b) = R(0, 3, a, b) + R(1, 2, a, b);
        }
    q.norm2_sq = q.q2.squaredNorm();
    q.norm3_sq = q.q3.squaredNorm();
    q.norm4_sq = q.q4.squaredNorm();
    return q;
}

QTensors q_tensors(const CurvatureData& curv) { return q_tensors(curv.riemann); }

double twistor_scalar(double S, const QTensors& q, double t)
{
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("twistor parameter t must be positive");
    return S + 2.0 / (t * t) - 0.25 * t * t * (q.norm3_sq + q.norm4_sq);
}

Eigen::Vector3d stereographic_point(double u, double v)
{
    if (!std::isfinite(u) || !std::isfinite(v)) throw DomainError("fiber coordinates must be finite");
    const double s = 1.0 + u * u + v * v;
    return {(1.0 - u * u - v * v) / s, 2.0 * u / s, 2.0 * v / s};
}

FiberPoint fiber_point(const Eigen::Vector3d& n)
{
    if (std::abs(n.norm() - 1.0) > 1e-12) throw DomainError("fiber point must be a unit vector");
    const Eigen::Matrix3d r =
        Eigen::Quaterniond::FromTwoVectors(Eigen::Vector3d::UnitX(), n).normalized().toRotationMatrix();
    return {n, mu_homomorphism(pattern_lift(r), 1)};
}

std::vector<Eigen::Vector3d> fibonacci_sphere(int samples)
{
    if (samples < 1) throw DomainError("sample count must be positive");
    std::vector<Eigen::Vector3d> pts;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < samples; ++k) {
        const double z = 1.0 - (2.0 * k + 1.0) / samples;
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * k;
        pts.emplace_back(z, rho * std::cos(phi), rho * std::sin(phi));
        pts.back().normalize();
    }
    return pts;
}

namespace {

// Compass search on the sphere from n0, maximizing sign * f.
double refine_extreme(const std::function<double(const Eigen::Vector3d&)>& f, Eigen::Vector3d n, double sign)
{
    double best = sign * f(n);
    double step = 0.25;
    while (step > 1e-9) {
        Eigen::Vector3d t1 = n.unitOrthogonal();
        Eigen::Vector3d t2 = n.cross(t1);
        bool improved = false;
        for (const Eigen::Vector3d& dir : {t1, Eigen::Vector3d(-t1), t2, Eigen::Vector3d(-t2)}) {
            const Eigen::Vector3d trial = (n + step * dir).normalized();
            const double value = sign * f(trial);
            if (value > best) {
                best = value;
                n = trial;
                improved = true;
                break;
            }
        }
        if (!improved) step *= 0.5;
    }
    return sign * best;
}

} // namespace

FiberScan fiber_scan(const CurvatureData& curv, int orientation, double t, int samples, double tol)
{
    if (samples < 8) throw DomainError("fiber scan needs at least 8 samples");
    const Tensor R = twistor_frame(curv.riemann, orientation);
    auto scalar_at = [&](const Eigen::Vector3d& n) {
        return twistor_scalar(curv.scalar, q_tensors(rotate(R, fiber_point(n).rotation.a)), t);
    };
    FiberScan scan;
    for (const auto& n : fibonacci_sphere(samples)) {
        FiberPoint fp = fiber_point(n);
        const double s = twistor_scalar(curv.scalar, q_tensors(rotate(R, fp.rotation.a)), t);
        scan.samples.push_back({std::move(fp), s});
    }
    auto by_scalar = [](const FiberSample& a, const FiberSample& b) { return a.scalar < b.scalar; };
    const auto lo = std::min_element(scan.samples.begin(), scan.samples.end(), by_scalar);
    const auto hi = std::max_element(scan.samples.begin(), scan.samples.end(), by_scalar);
    scan.min = refine_extreme(scalar_at, lo->point.n, -1.0);
    scan.max = refine_extreme(scalar_at, hi->point.n, 1.0);
    double sum = 0.0;
    for (const auto& s : scan.samples) sum += s.scalar;
    scan.mean = sum / static_cast<double>(scan.samples.size());
    scan.spread = scan.max - scan.min;
    scan.constant = scan.spread <= tol * (1.0 + std::abs(scan.mean));
    return scan;
}

OneillTensor oneill_tensor(const CurvatureData& curv, int orientation, double t, const Eigen::Vector3d& n)
{
    if (!(t > 0.0)) throw DomainError("twistor parameter t must be positive");
    const QTensors q = q_tensors(rotate(twistor_frame(curv.riemann, orientation), fiber_point(n).rotation.a));
    OneillTensor out{Tensor(6, 3), 0.0};
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            out.components(4, a, b) = 0.5 * t * q.q3(a, b);
            out.components(5, a, b) = 0.5 * t * q.q4(a, b);
            out.components(b, a, 4) = -0.5 * t * q.q3(a, b);
            out.components(b, a, 5) = -0.5 * t * q.q4(a, b);
        }
    out.max_abs = max_abs(out.components);
    return out;
}

OneillVerdict oneill_scan(const CurvatureData& curv, int orientation, double t, int samples, double tol)
{
    OneillVerdict v;
    for (const auto& n : fibonacci_sphere(samples))
        v.max_abs = std::max(v.max_abs, oneill_tensor(curv, orientation, t, n).max_abs);
    v.integrable = v.max_abs <= tol * (1.0 + max_abs(curv.riemann));
    return v;
}

TwistorChart build_twistor_chart(const MetricField& base, double t)
{
    if (base.dim() != 4) throw DimensionError("twistor chart needs a 4-dimensional base");
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("twistor parameter t must be positive");
    if (base.derivative_loss() != 0) throw DomainError("twistor chart needs a base with full derivatives");

    const int orientation = base.orientation();
    auto evaluator = [base, t, orientation](std::span<const Jet> x) {
        if (x.size() != 6) throw DimensionError("twistor chart has 6 coordinates");
        const JetMatrix g = base.evaluate(x.subspan(0, 4));
        const CoframeData cf = orthonormal_coframe(g);
        const ConnectionForms conn = connection_forms(cf);
        const int reflect = orientation == 1 ? 3 : -1;
        auto sign = [reflect](int i) { return i == reflect ? -1.0 : 1.0; };

        // a(u, v) = (I + v eta_2 - u eta_3) / sqrt(1 + u^2 + v^2) lifts the rotation n0 -> n(u, v).
        const Jet& u = x[4];
        const Jet& v = x[5];
        const Jet norm = reciprocal(sqrt(u * u + v * v + 1.0));
        const auto eta = pattern_basis(1);
        JetMatrix a(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                a(i, j) = ((i == j ? 1.0 : 0.0) + v * eta[1](i, j) - u * eta[2](i, j)) * norm;

        // Rotated connection: w~_alpha = a^T w'_alpha a + a^T d_alpha a.
        std::array<JetMatrix, 6> rotated;
        for (int alpha = 0; alpha < 6; ++alpha) {
            JetMatrix w = JetMatrix::Constant(4, 4, Jet(0.0));
            if (alpha < 4)
                for (int i = 0; i < 4; ++i)
                    for (int j = 0; j < 4; ++j) w(i, j) = conn.gamma(i, j, alpha) * (sign(i) * sign(j));
            const JetMatrix da = alpha >= 4 ? derivative(a, alpha) : JetMatrix::Constant(4, 4, Jet(0.0));
            JetMatrix out(4, 4);
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    Jet s(0.0);
                    for (int k = 0; k < 4; ++k) {
                        Jet inner_sum(0.0);
                        for (int l = 0; l < 4; ++l) inner_sum += w(k, l) * a(l, j);
                        s += a(k, i) * (inner_sum + da(k, j));
                    }
                    out(i, j) = s;
                }
            rotated[alpha] = out;
        }

        // theta^1..4 = rotated base coframe, theta^5,6 = t (w~^1_3 + w~^4_2), t (w~^1_4 + w~^2_3).
        JetMatrix theta = JetMatrix::Constant(6, 6, Jet(0.0));
        for (int i = 0; i < 4; ++i)
            for (int alpha = 0; alpha < 4; ++alpha) {
                Jet s(0.0);
                for (int j = 0; j < 4; ++j) s += a(j, i) * cf.b(j, alpha) * sign(j);
                theta(i, alpha) = s;
            }
        for (int alpha = 0; alpha < 6; ++alpha) {
            theta(4, alpha) = (rotated[alpha](0, 2) + rotated[alpha](3, 1)) * (t * kVerticalScale);
            theta(5, alpha) = (rotated[alpha](0, 3) + rotated[alpha](1, 2)) * (t * kVerticalScale);
        }

        JetMatrix G(6, 6);
        for (int alpha = 0; alpha < 6; ++alpha)
            for (int beta = alpha; beta < 6; ++beta) {
                Jet s(0.0);
                for (int p = 0; p < 6; ++p) s += theta(p, alpha) * theta(p, beta);
                G(alpha, beta) = s;
                G(beta, alpha) = s;
            }
        return G;
    };

    std::vector<std::string> names = base.coordinate_names();
    names.push_back("u");
    names.push_back("v");
    MetricField chart("twistor(" + base.name() + ")", names, 1, evaluator, 1);
    Parameters params = base.parameters();
    params.emplace_back("t", t);
    chart.set_parameters(params);

    const double fiber[5][2] = {{0.0, 0.0}, {0.3, -0.2}, {0.5, 0.4}, {-0.7, 0.1}, {1.2, -0.8}};
    std::vector<ChartPoint> pts;
    for (std::size_t k = 0; k < base.suggested_points().size(); ++k)
        pts.push_back(chart_point(base.suggested_points()[k], fiber[k % 5][0], fiber[k % 5][1]));
    chart.set_suggested_points(std::move(pts));
    return {base, t, std::move(chart)};
}

ChartPoint chart_point(const ChartPoint& base_point, double u, double v)
{
    if (base_point.dim() != 4) throw DimensionError("base point must have 4 coordinates");
    Eigen::VectorXd x(6);
    x << base_point.coords, u, v;
    return ChartPoint(std::move(x));
}

TwistorRicci twistor_ricci_analysis(const TwistorChart& chart, const ChartPoint& p6, double h, bool with_derivative)
{
    const Geometry geo = analyze(chart.chart, p6);
    TwistorRicci out;
    out.ricci = geo.curv.ricci;
    out.scalar_engine = geo.curv.scalar;
    out.einstein_residual =
        (out.ricci - (out.scalar_engine / 6.0) * Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff();

    // The factorization makes e5, e6 span the fiber tangent, so e1..e4 are horizontal.
    const Tensor w = values(geo.conn.omega);
    for (int a = 0; a < 4; ++a)
        for (int alpha = 4; alpha < 6; ++alpha)
            for (int beta = 4; beta < 6; ++beta)
                out.totally_geodesic_residual = std::max(out.totally_geodesic_residual, std::abs(w(a, beta, alpha)));
    for (int p = 4; p < 6; ++p)
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) out.oneill_norm_sq += w(p, b, a) * w(p, b, a);

    if (with_derivative) {
        const MetricField& m = chart.chart;
        auto ricci_field = [&m](const ChartPoint& q) {
            const Eigen::MatrixXd ric = curvature_at(m, q).ricci;
            Tensor r(6, 2);
            for (int i = 0; i < 6; ++i)
                for (int j = 0; j < 6; ++j) r(i, j) = ric(i, j);
            return r;
        };
        const CovariantDerivative d = covariant_derivative(m, p6, ricci_field, h);
        out.ricci_parallel_residual = std::sqrt(squared_norm(d.value));
        out.accuracy_warning = d.accuracy_warning;
    }
    return out;
}

IdentityResiduals verify_identities(const MetricField& m, const ChartPoint& p, double t, double tol)
{
    if (m.dim() != 4) throw DimensionError("twistor identities need dimension 4");
    const int o = m.orientation();
    const CurvatureData curv = curvature_at(m, p, tol);
    const Tensor R = twistor_frame(curv.riemann, o);
    const QTensors q = q_tensors(R);

    IdentityResiduals out;
    const double wm = squared_norm(anti_self_dual_part(curv.weyl, o));
    const double rhs = q.norm2_sq + q.norm3_sq + q.norm4_sq - curv.scalar * curv.scalar / 12.0;
    out.weyl_minus_norm = std::abs(wm - rhs);

    if (curv.einstein_constant) {
        out.einstein_applicable = true;
        CurvatureData framed = curv;
        framed.riemann = R;
        const Eigen::Matrix3d X = curvature_blocks(framed, 1).A;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(X);
        Eigen::Matrix3d r = eig.eigenvectors();
        if (r.determinant() < 0.0) r.col(2) *= -1.0;
        const Eigen::Matrix3d diag = r.transpose() * X * r;
        const QTensors qd = q_tensors(rotate(R, pattern_lift(r)));
        out.einstein_q = std::max(std::abs(qd.norm3_sq - 4.0 * diag(1, 1) * diag(1, 1)),
                                  std::abs(qd.norm4_sq - 4.0 * diag(2, 2) * diag(2, 2)));
    }

    out.scalar_formula = twistor_scalar(curv.scalar, q, t);
    const TwistorChart chart = build_twistor_chart(m, t);
    out.scalar_engine = curvature_at(chart.chart, chart_point(p, 0.0, 0.0)).scalar;
    out.scalar_cross = std::abs(out.scalar_formula - out.scalar_engine);
    return out;
}

} // namespace tcurv
