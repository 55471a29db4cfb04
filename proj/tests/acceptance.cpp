// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include "tcurv/blocks.hpp"
#include "tcurv/geom.hpp"
#include "tcurv/metric.hpp"
#include "tcurv/twistor.hpp"

#include <Eigen/LU>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

using namespace tcurv;

namespace {

struct Criterion {
    bool pass = true;
    std::string detail;

    void require(bool ok, const char* what, double measured)
    {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s%s=%.3e", detail.empty() ? "" : ", ", what, measured);
        detail += buf;
        if (!ok) {
            pass = false;
            detail += "(!)";
        }
    }
    void flag(bool ok, const std::string& what)
    {
        detail += (detail.empty() ? "" : ", ") + what + (ok ? "" : "(!)");
        pass = pass && ok;
    }
};

double max_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

Eigen::Matrix4d random_rotation(std::mt19937_64& rng)
{
    std::normal_distribution<double> N;
    Eigen::Matrix4d x;
    for (int i = 0; i < 16; ++i) x(i) = N(rng);
    Eigen::Matrix4d q = Eigen::HouseholderQR<Eigen::Matrix4d>(x).householderQ();
    if (q.determinant() < 0.0) q.col(0) *= -1.0;
    return q;
}

// Independent fiber-range oracle: unit quaternions cos|x| + sin|x| x/|x| of one family act on the
// frame, q-norms are contracted from raw components, and a grid search is polished by compass steps.
Eigen::Matrix4d quaternion_rotation(const Eigen::Vector3d& x, int s)
{
    auto two_form = [](int i, int j, int k, int l, double sign) {
        Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
        m(i, j) = 1.0, m(j, i) = -1.0, m(k, l) += sign, m(l, k) -= sign;
        return m;
    };
    const Eigen::Matrix4d P[3] = {two_form(0, 1, 2, 3, s), two_form(0, 2, 3, 1, s), two_form(0, 3, 1, 2, s)};
    const double th = x.norm();
    Eigen::Matrix4d a = std::cos(th) * Eigen::Matrix4d::Identity();
    if (th > 0.0)
        for (int k = 0; k < 3; ++k) a += std::sin(th) * x[k] / th * P[k];
    return a;
}

double oracle_scalar(const CurvatureData& c, double t, const Eigen::Matrix4d& a)
{
    Tensor R = c.riemann;
    for (std::size_t f = 0; f < R.size(); ++f) {
        const auto idx = R.index_of(f);
        if (std::count(idx.begin(), idx.end(), 3) % 2 == 1) R.data()[f] = -R.data()[f];
    }
    R = rotate(R, a);
    double q = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            q += std::pow(R(0, 2, i, j) + R(3, 1, i, j), 2) + std::pow(R(0, 3, i, j) + R(1, 2, i, j), 2);
    return c.scalar + 2.0 / (t * t) - 0.25 * t * t * q;
}

double oracle_extreme(const CurvatureData& c, double t, double sign)
{
    double overall = -1e300;
    for (int s : {1, -1}) {
        auto f = [&](const Eigen::Vector3d& x) { return sign * oracle_scalar(c, t, quaternion_rotation(x, s)); };
        const int n = 17;
        Eigen::Vector3d best_x = Eigen::Vector3d::Zero();
        double best = f(best_x);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    const Eigen::Vector3d x = (Eigen::Vector3d(i, j, k) / (n - 1) - Eigen::Vector3d::Constant(0.5)) * 3.2;
                    const double v = f(x);
                    if (v > best) best = v, best_x = x;
                }
        for (double step = 0.1; step > 1e-10;) {
            bool moved = false;
            for (int axis = 0; axis < 3 && !moved; ++axis)
                for (double dir : {1.0, -1.0}) {
                    Eigen::Vector3d x = best_x;
                    x[axis] += dir * step;
                    const double v = f(x);
                    if (v > best) {
                        best = v, best_x = x, moved = true;
                        break;
                    }
                }
            if (!moved) step *= 0.5;
        }
        overall = std::max(overall, best);
    }
    return sign * overall;
}

Criterion constant_curvature_pin()
{
    Criterion c;
    const MetricField m = builtin("s4");
    double ds = 0, dw = 0, dac = 0, db = 0;
    for (const auto& p : m.suggested_points()) {
        const CurvatureData curv = curvature_at(m, p);
        const BlockData b = curvature_blocks(curv, 1);
        ds = std::max(ds, std::abs(curv.scalar - 12.0));
        dw = std::max(dw, max_abs(curv.weyl));
        dac = std::max({dac, max_diff(b.A, Eigen::Matrix3d::Identity()), max_diff(b.C, Eigen::Matrix3d::Identity())});
        db = std::max(db, b.B.cwiseAbs().maxCoeff());
    }
    c.require(ds <= 1e-9, "|S-12|", ds);
    c.require(dw <= 1e-9, "max|W|", dw);
    c.require(dac <= 1e-9, "|A-I|,|C-I|", dac);
    c.require(db <= 1e-9, "|B|", db);
    return c;
}

Criterion kaehler_spectrum()
{
    Criterion c;
    const MetricField m = builtin("cp2");
    double d = 0, ds = 0;
    for (const auto& p : m.suggested_points()) {
        const CurvatureData curv = curvature_at(m, p);
        const SpectralReport r = spectral_summary(curvature_blocks(curv, m.orientation()));
        d = std::max(d, (r.weyl_plus_eigen - Eigen::Vector3d(4.0, -2.0, -2.0)).cwiseAbs().maxCoeff());
        ds = std::max(ds, std::abs(curv.scalar - 24.0));
    }
    c.require(ds <= 1e-8, "|S-24|", ds);
    c.require(d <= 1e-8, "|eig-{4,-2,-2}|", d);
    return c;
}

Criterion product_block_spectrum()
{
    Criterion c;
    const MetricField m = builtin("s2xs2");
    double d = 0, ds = 0;
    for (const auto& p : m.suggested_points()) {
        const CurvatureData curv = curvature_at(m, p);
        const BlockData b = curvature_blocks(curv, 1);
        d = std::max(d, (symmetric_eigenvalues(b.A) - Eigen::Vector3d(1.0, 0.0, 0.0)).cwiseAbs().maxCoeff());
        ds = std::max(ds, std::abs(curv.scalar - 4.0));
    }
    c.require(ds <= 1e-8, "|S-4|", ds);
    c.require(d <= 1e-8, "|eig(A)-{1,0,0}|", d);
    return c;
}

Criterion scalar_cross_validation()
{
    Criterion c;
    double worst = 0;
    for (const char* name : {"flat4", "s4", "s2xs2", "schwarzschild", "eguchi_hanson"}) {
        const MetricField m = builtin(name);
        for (double t : {0.5, 1.0, 2.0})
            for (int k = 0; k < 3; ++k) worst = std::max(worst, verify_identities(m, m.suggested_points()[k], t).scalar_cross);
    }
    c.require(worst <= 1e-6, "max|formula-engine|", worst);
    return c;
}

Criterion fiber_constancy()
{
    Criterion c;
    for (const char* name : {"s4", "cp2", "eguchi_hanson", "s2xs2", "schwarzschild"}) {
        const MetricField m = builtin(name);
        const bool expected = std::string(name) == "s4" || std::string(name) == "cp2" || std::string(name) == "eguchi_hanson";
        bool all = true, any = false;
        for (const auto& p : m.suggested_points()) {
            const bool k = fiber_scan(curvature_at(m, p), m.orientation(), 1.0).constant;
            all = all && k;
            any = any || k;
        }
        c.flag(expected ? all : !any, std::string(name) + (expected ? ":constant" : ":varies"));
    }
    const MetricField m = builtin("s2xs2");
    const CurvatureData curv = curvature_at(m, m.suggested_points()[1]);
    const FiberScan scan = fiber_scan(curv, 1, 1.0);
    const double lo = oracle_extreme(curv, 1.0, -1.0), hi = oracle_extreme(curv, 1.0, 1.0);
    c.require(std::abs(scan.min - 5.0) <= 1e-6, "scanMin-5", std::abs(scan.min - 5.0));
    c.require(std::abs(scan.max - 6.0) <= 1e-6, "scanMax-6", std::abs(scan.max - 6.0));
    c.require(std::abs(lo - 5.0) <= 1e-6 && std::abs(hi - 6.0) <= 1e-6, "oracle-[5,6]",
              std::max(std::abs(lo - 5.0), std::abs(hi - 6.0)));
    c.require(std::max(std::abs(scan.min - lo), std::abs(scan.max - hi)) <= 1e-6, "scan-oracle",
              std::max(std::abs(scan.min - lo), std::abs(scan.max - hi)));
    return c;
}

Criterion scaled_sphere_twistor_einstein()
{
    Criterion c;
    double einstein = 0, scalar = 0;
    for (double t : {0.7, 1.0, 1.5}) {
        const MetricField m = builtin("s4", {{"r", t}});
        const TwistorChart chart = build_twistor_chart(m, t);
        for (int k = 0; k < 3; ++k) {
            const TwistorRicci r =
                twistor_ricci_analysis(chart, chart_point(m.suggested_points()[k], 0.3 * k, -0.2 * k), 1e-4, false);
            einstein = std::max(einstein, r.einstein_residual);
            scalar = std::max(scalar, std::abs(r.scalar_engine - 12.0 / (t * t)));
        }
    }
    c.require(einstein <= 1e-6, "einsteinResidual", einstein);
    c.require(scalar <= 1e-6, "|S~-12/t^2|", scalar);
    return c;
}

Criterion oneill_integrability()
{
    Criterion c;
    for (const char* name : {"flat4", "eguchi_hanson", "schwarzschild", "s2xs2", "s4", "cp2"}) {
        const MetricField m = builtin(name);
        const bool zero = std::string(name) == "flat4" || std::string(name) == "eguchi_hanson";
        double lo = 1e300, hi = 0;
        for (const auto& p : m.suggested_points()) {
            const double v = oneill_scan(curvature_at(m, p), m.orientation(), 1.0).max_abs;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (zero)
            c.require(hi <= 1e-8, (std::string(name) + ":max|A|").c_str(), hi);
        else
            c.require(lo > 1e-3, (std::string(name) + ":min|A|").c_str(), lo);
    }
    return c;
}

Criterion twistor_ricci_parallel()
{
    Criterion c;
    const std::pair<double, double> fiber[] = {{0.0, 0.0}, {0.5, 0.4}, {-0.7, 0.1}};
    for (const char* name : {"flat4", "eguchi_hanson", "schwarzschild", "s2xs2"}) {
        const MetricField m = builtin(name);
        const bool parallel = std::string(name) == "flat4" || std::string(name) == "eguchi_hanson";
        const TwistorChart chart = build_twistor_chart(m, 1.0);
        double worst = 0;
        for (auto [u, v] : fiber)
            worst = std::max(worst,
                             twistor_ricci_analysis(chart, chart_point(m.suggested_points()[1], u, v)).ricci_parallel_residual);
        if (parallel)
            c.require(worst <= 1e-5, (std::string(name) + ":|dRic|").c_str(), worst);
        else
            c.require(worst > 1e-3, (std::string(name) + ":|dRic|").c_str(), worst);
    }
    return c;
}

Criterion transformation_law()
{
    Criterion c;
    std::mt19937_64 rng(0x5eed);
    double law = 0;
    for (const auto& e : catalog()) {
        const MetricField m = builtin(e.name);
        const int o = m.orientation();
        const CurvatureData curv = curvature_at(m, m.suggested_points()[1]);
        const BlockData blocks = curvature_blocks(curv, o);
        for (int trial = 0; trial < 100; ++trial) {
            const Eigen::Matrix4d a = random_rotation(rng);
            CurvatureData rotated = curv;
            rotated.riemann = rotate(curv.riemann, a);
            const BlockData direct = curvature_blocks(rotated, o);
            const BlockData predicted = rotate_blocks(blocks, mu_homomorphism(a, o));
            law = std::max(law, max_diff(direct.assembled(), predicted.assembled()) / (1.0 + blocks.max_entry()));
        }
    }
    double hom = 0, kernel = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Matrix4d a = random_rotation(rng), b = random_rotation(rng);
        const FrameRotation ma = mu_homomorphism(a), mb = mu_homomorphism(b), mab = mu_homomorphism(a * b);
        hom = std::max({hom, max_diff(mab.a_plus, ma.a_plus * mb.a_plus), max_diff(mab.a_minus, ma.a_minus * mb.a_minus)});
    }
    for (double s : {1.0, -1.0}) {
        const FrameRotation k = mu_homomorphism(s * Eigen::Matrix4d::Identity());
        kernel = std::max({kernel, max_diff(k.a_plus, Eigen::Matrix3d::Identity()),
                           max_diff(k.a_minus, Eigen::Matrix3d::Identity())});
    }
    c.require(law <= 1e-9, "blockLaw", law);
    c.require(hom <= 1e-12, "homomorphism", hom);
    c.require(kernel <= 1e-15, "kernel{+-I}", kernel);
    return c;
}

Criterion q_norm_identities()
{
    Criterion c;
    double wm = 0, eq = 0;
    for (const auto& e : catalog()) {
        const MetricField m = builtin(e.name);
        for (const auto& p : m.suggested_points()) {
            const CurvatureData curv = curvature_at(m, p);
            const IdentityResiduals r = verify_identities(m, p, 1.0);
            const double scale = 1.0 + curv.scalar * curv.scalar / 12.0 + squared_norm(curv.weyl);
            wm = std::max(wm, r.weyl_minus_norm / scale);
            if (r.einstein_applicable) eq = std::max(eq, r.einstein_q / scale);
        }
    }
    c.require(wm <= 1e-9, "|W-|^2 vs q-norms", wm);
    c.require(eq <= 1e-9, "|q|^2 vs 4A^2", eq);
    return c;
}

Criterion bochner_weitzenboeck()
{
    Criterion c;
    double residual = 0, balance = 0;
    for (const char* name : {"s2xs2", "s4", "cp2"})
        for (int o : {1, -1}) {
            const MetricField m = builtin(name);
            for (const auto& p : m.suggested_points()) {
                const SpectralReport r = spectral_report(m, p, o);
                const BlockData b = curvature_blocks(curvature_at(m, p), o);
                residual = std::max(residual, std::abs(r.bochner_residual));
                balance = std::max(balance, std::abs(0.5 * b.S * r.weyl_minus_norm - 18.0 * r.weyl_minus_det));
            }
        }
    c.require(residual <= 1e-6, "bochnerResidual", residual);
    c.require(balance <= 1e-9, "(S/2)|W-|^2-18det", balance);
    return c;
}

Criterion structure_equations()
{
    Criterion c;
    double first = 0, second = 0, inv = 0;
    for (const auto& e : catalog()) {
        const MetricField m = builtin(e.name);
        for (const auto& p : m.suggested_points()) {
            const Geometry geo = analyze(m, p);
            first = std::max(first, first_structure_residual(geo.coframe, geo.conn));
            second = std::max(second, second_structure_residual(m, p));
            inv = std::max(inv, curvature_invariants(geo.curv).worst());
        }
    }
    c.require(first <= 1e-9, "first", first);
    c.require(second <= 1e-9, "second", second);
    c.require(inv <= 1e-9, "symmetries", inv);
    return c;
}

} // namespace

int main()
{
    struct Entry {
        const char* title;
        Criterion (*run)();
    };
    const Entry entries[] = {
        {"constant curvature pin (unit S4)", constant_curvature_pin},
        {"Kaehler-side Weyl spectrum (CP2)", kaehler_spectrum},
        {"block spectrum (S2xS2)", product_block_spectrum},
        {"twistor scalar: formula vs 6-dim engine", scalar_cross_validation},
        {"fiber constancy verdicts and S2xS2 range", fiber_constancy},
        {"scaled S4 twistor space is Einstein", scaled_sphere_twistor_einstein},
        {"O'Neill tensor integrability", oneill_integrability},
        {"twistor Ricci-parallel verdicts", twistor_ricci_parallel},
        {"frame-rotation equivariance and mu", transformation_law},
        {"q-norm identities", q_norm_identities},
        {"Bochner-Weitzenboeck residual", bochner_weitzenboeck},
        {"structure equations and curvature symmetries", structure_equations},
    };
    int failed = 0;
    int index = 1;
    for (const auto& e : entries) {
        Criterion c;
        try {
            c = e.run();
        } catch (const std::exception& ex) {
            c.pass = false;
            c.detail = std::string("exception: ") + ex.what();
        }
        std::printf("[%s] %02d %s: %s\n", c.pass ? "PASS" : "FAIL", index++, e.title, c.detail.c_str());
        failed += c.pass ? 0 : 1;
    }
    std::printf("%d of %d criteria passed\n", 12 - failed, 12);
    return failed == 0 ? 0 : 1;
}
