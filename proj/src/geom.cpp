#include "tcurv/geom.hpp"

#include "tcurv/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <algorithm>
#include <array>
#include <cmath>

namespace tcurv {

double max_abs(const Tensor& t)
{
    double m = 0.0;
    for (double v : t.data()) m = std::max(m, std::abs(v));
    return m;
}

double squared_norm(const Tensor& t)
{
    double s = 0.0;
    for (double v : t.data()) s += v * v;
    return s;
}

Tensor operator-(const Tensor& a, const Tensor& b)
{
    if (a.dim() != b.dim() || a.rank() != b.rank()) throw DimensionError("tensor shapes differ");
    Tensor r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r.data()[i] -= b.data()[i];
    return r;
}

Tensor values(const JetTensor& t)
{
    Tensor r(t.dim(), t.rank());
    for (std::size_t i = 0; i < t.size(); ++i) r.data()[i] = t.data()[i].value();
    return r;
}

JetMatrix metric_jets(const MetricField& m, const ChartPoint& p, int order)
{
    if (p.dim() != m.dim())
        throw DimensionError("point has " + std::to_string(p.dim()) + " coordinates, chart has " +
                             std::to_string(m.dim()));
    if (!p.finite()) throw DomainError("chart point has non-finite coordinates");
    const int eval_order = order + m.derivative_loss();
    if (order < 0 || eval_order > kMaxJetOrder)
        throw DomainError("jet order " + std::to_string(order) + " not available for " + m.name());

    const JetLayout& layout = jet_layout(m.dim(), eval_order);
    std::vector<Jet> x;
    for (int a = 0; a < m.dim(); ++a) x.push_back(Jet::variable(layout, a, p.coords[a]));
    JetMatrix g = m.evaluate(x);
    const int n = m.dim();
    if (g.rows() != n || g.cols() != n) throw DimensionError("metric evaluator returned the wrong shape");

    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (!std::isfinite(g(i, j).value())) throw DomainError("non-finite metric component");
            if (j <= i) continue;
            const double a = g(i, j).value(), b = g(j, i).value();
            if (std::abs(a - b) > 1e-12 * (1.0 + std::max(std::abs(a), std::abs(b))))
                throw SpecError("metric components g[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) +
                                "] and g[" + std::to_string(j + 1) + "][" + std::to_string(i + 1) + "] differ");
            g(i, j) = g(j, i);
        }
    }
    return g;
}

namespace {

void require_positive_definite(const Eigen::MatrixXd& g)
{
    const Eigen::Index n = g.rows();
    for (Eigen::Index k = 1; k <= n; ++k) {
        Eigen::LLT<Eigen::MatrixXd> llt(g.topLeftCorner(k, k));
        if (llt.info() != Eigen::Success) throw DefinitenessError(static_cast<int>(k));
    }
}

JetMatrix lower_triangular_inverse(const JetMatrix& L)
{
    const Eigen::Index n = L.rows();
    JetMatrix X = JetMatrix::Constant(n, n, Jet(0.0));
    for (Eigen::Index i = 0; i < n; ++i) {
        X(i, i) = reciprocal(L(i, i));
        for (Eigen::Index j = 0; j < i; ++j) {
            Jet s(0.0);
            for (Eigen::Index k = j; k < i; ++k) s += L(i, k) * X(k, j);
            X(i, j) = -s * X(i, i);
        }
    }
    return X;
}

bool has_order_zero_entry(const JetMatrix& m)
{
    for (Eigen::Index i = 0; i < m.size(); ++i)
        if (m.data()[i].has_layout() && m.data()[i].order() == 0) return true;
    return false;
}

} // namespace

CoframeData orthonormal_coframe(const JetMatrix& g)
{
    const int n = static_cast<int>(g.rows());
    if (g.cols() != n) throw DimensionError("metric matrix is not square");
    require_positive_definite(values(g));

    // g = b^T b with b lower triangular: factor from the last row upwards so
    // that e_n is along d/dx^n, e_{n-1} in span(d/dx^{n-1}, d/dx^n), and so on.
    JetMatrix b = JetMatrix::Constant(n, n, Jet(0.0));
    for (int i = n - 1; i >= 0; --i) {
        Jet d = g(i, i);
        for (int k = i + 1; k < n; ++k) d -= b(k, i) * b(k, i);
        if (!(d.value() > 0.0)) throw DefinitenessError(n - i);
        b(i, i) = sqrt(d);
        for (int a = 0; a < i; ++a) {
            Jet s = g(i, a);
            for (int k = i + 1; k < n; ++k) s -= b(k, i) * b(k, a);
            b(i, a) = s / b(i, i);
        }
    }
    return {b, lower_triangular_inverse(b)};
}

ConnectionForms connection_forms(const CoframeData& coframe)
{
    const int n = coframe.dim();
    if (has_order_zero_entry(coframe.b)) throw DomainError("connection forms need first derivatives of the coframe");
    const JetMatrix& bi = coframe.b_inv;

    std::vector<JetMatrix> db;
    for (int beta = 0; beta < n; ++beta) db.push_back(derivative(coframe.b, beta));

    ConnectionForms out{JetTensor(n, 3), JetTensor(n, 3), JetTensor(n, 3)};
    for (int i = 0; i < n; ++i) {
        // D(beta, alpha) = d_beta b^i_alpha - d_alpha b^i_beta
        JetMatrix D = JetMatrix::Constant(n, n, Jet(0.0));
        for (int beta = 0; beta < n; ++beta)
            for (int alpha = beta + 1; alpha < n; ++alpha) {
                D(beta, alpha) = db[beta](i, alpha) - db[alpha](i, beta);
                D(alpha, beta) = -D(beta, alpha);
            }
        for (int j = 0; j < n; ++j) {
            for (int k = j + 1; k < n; ++k) {
                Jet s(0.0);
                for (int beta = 0; beta < n; ++beta)
                    for (int alpha = beta + 1; alpha < n; ++alpha)
                        s += D(beta, alpha) * (bi(beta, j) * bi(alpha, k) - bi(alpha, j) * bi(beta, k));
                out.c(i, j, k) = s;
                out.c(i, k, j) = -s;
            }
        }
    }

    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                Jet w = (out.c(i, j, k) + out.c(j, k, i) - out.c(k, i, j)) * 0.5;
                out.omega(j, i, k) = -w;
                out.omega(i, j, k) = std::move(w);
            }

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int a = 0; a < n; ++a) {
                Jet s(0.0);
                for (int k = 0; k < n; ++k) s += out.omega(i, j, k) * coframe.b(k, a);
                out.gamma(i, j, a) = s;
            }
    return out;
}

namespace {

// Frame components F(i,j,l,m) = d omega^i_j (e_l, e_m) from coordinate derivatives
// dgamma(i,j,a,beta) = d_beta gamma(i,j,a).
Tensor exterior_derivative_in_frame(const Tensor& dgamma, const Eigen::MatrixXd& bi)
{
    const int n = dgamma.dim();
    Tensor F(n, 4);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            Eigen::MatrixXd E(n, n);
            for (int beta = 0; beta < n; ++beta)
                for (int alpha = 0; alpha < n; ++alpha)
                    E(beta, alpha) = dgamma(i, j, alpha, beta) - dgamma(i, j, beta, alpha);
            const Eigen::MatrixXd f = bi.transpose() * E * bi;
            for (int l = 0; l < n; ++l)
                for (int m = 0; m < n; ++m) {
                    F(i, j, l, m) = f(l, m);
                    F(j, i, l, m) = -f(l, m);
                }
        }
    return F;
}

void add_quadratic_term(Tensor& F, const Tensor& w)
{
    const int n = F.dim();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l)
                for (int m = 0; m < n; ++m) {
                    double s = 0.0;
                    for (int k = 0; k < n; ++k) s += w(i, k, l) * w(k, j, m) - w(i, k, m) * w(k, j, l);
                    F(i, j, l, m) += s;
                }
}

} // namespace

Tensor curvature_forms(const CoframeData& coframe, const ConnectionForms& conn)
{
    const int n = coframe.dim();
    for (const Jet& g : conn.gamma.data())
        if (g.has_layout() && g.order() == 0)
            throw DomainError("curvature forms need second derivatives of the metric");
    Tensor dgamma(n, 4);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int a = 0; a < n; ++a)
                for (int beta = 0; beta < n; ++beta)
                    dgamma(i, j, a, beta) = conn.gamma(i, j, a).derivative(beta).value();
    Tensor F = exterior_derivative_in_frame(dgamma, values(coframe.b_inv));
    add_quadratic_term(F, values(conn.omega));
    return F;
}

CurvatureData riemann_components(const Tensor& omega)
{
    CurvatureData c;
    c.dim = omega.dim();
    c.riemann = omega;
    const int n = c.dim;
    const double scale = 1.0 + max_abs(omega);
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    const double r = omega(i, j, k, l);
                    worst = std::max(worst, std::abs(r - omega(k, l, i, j)));
                    worst = std::max(worst, std::abs(r + omega(i, k, l, j) + omega(i, l, j, k)) / 3.0);
                }
    if (worst > 1e-7 * scale)
        throw ConsistencyError("curvature components violate pair symmetry or Bianchi by " + std::to_string(worst));
    return c;
}

namespace {

void fill_ricci(CurvatureData& c)
{
    const int n = c.dim;
    c.ricci = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) c.ricci(i, j) += c.riemann(k, i, k, j);
    c.ricci = 0.5 * (c.ricci + c.ricci.transpose()).eval();
    c.scalar = c.ricci.trace();
    c.traceless_ricci = c.ricci - (c.scalar / n) * Eigen::MatrixXd::Identity(n, n);
    c.einstein_residual = c.traceless_ricci.cwiseAbs().maxCoeff();
}

} // namespace

Tensor kulkarni_nomizu(const Eigen::MatrixXd& h, const Eigen::MatrixXd& k)
{
    const int n = static_cast<int>(h.rows());
    if (h.cols() != n || k.rows() != n || k.cols() != n) throw DimensionError("Kulkarni-Nomizu: shape mismatch");
    const double tol = 1e-12 * (1.0 + h.cwiseAbs().maxCoeff() + k.cwiseAbs().maxCoeff());
    if ((h - h.transpose()).cwiseAbs().maxCoeff() > tol || (k - k.transpose()).cwiseAbs().maxCoeff() > tol)
        throw DomainError("Kulkarni-Nomizu product needs symmetric arguments");
    Tensor t(n, 4);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    t(i, j, a, b) = h(i, a) * k(j, b) + h(j, b) * k(i, a) - h(i, b) * k(j, a) - h(j, a) * k(i, b);
    return t;
}

namespace {

Tensor weyl_free_part(const CurvatureData& c)
{
    const int n = c.dim;
    const Eigen::MatrixXd g = Eigen::MatrixXd::Identity(n, n);
    Tensor e = kulkarni_nomizu(c.traceless_ricci, g);
    Tensor s = kulkarni_nomizu(g, g);
    Tensor out(n, 4);
    const double ce = 1.0 / (n - 2), cs = c.scalar / (2.0 * n * (n - 1));
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = ce * e.data()[i] + cs * s.data()[i];
    return out;
}

} // namespace

CurvatureData ricci_scalar_weyl(CurvatureData curv, double tol)
{
    if (curv.dim < 3) throw DimensionError("Weyl decomposition needs dimension at least 3");
    fill_ricci(curv);
    curv.weyl = curv.riemann - weyl_free_part(curv);
    if (curv.einstein_residual <= tol * (1.0 + std::abs(curv.scalar)))
        curv.einstein_constant = curv.scalar / curv.dim;
    return curv;
}

Geometry analyze(const MetricField& m, const ChartPoint& p, double tol)
{
    Geometry geo;
    geo.g = metric_jets(m, p, 2);
    geo.coframe = orthonormal_coframe(geo.g);
    geo.conn = connection_forms(geo.coframe);
    CurvatureData c = riemann_components(curvature_forms(geo.coframe, geo.conn));
    if (c.dim >= 3) {
        geo.curv = ricci_scalar_weyl(std::move(c), tol);
    } else {
        fill_ricci(c);
        geo.curv = std::move(c);
    }
    return geo;
}

CurvatureData curvature_at(const MetricField& m, const ChartPoint& p, double tol)
{
    return analyze(m, p, tol).curv;
}

int permutation_sign(std::span<const int> idx)
{
    int sign = 1;
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = a + 1; b < idx.size(); ++b) {
            if (idx[a] == idx[b]) return 0;
            if (idx[a] > idx[b]) sign = -sign;
        }
    return sign;
}

Tensor rotate(const Tensor& t, const Eigen::MatrixXd& a)
{
    const int n = t.dim();
    if (a.rows() != n || a.cols() != n) throw DimensionError("rotation has the wrong size");
    Tensor cur = t;
    for (int slot = 0; slot < t.rank(); ++slot) {
        Tensor next(n, t.rank());
        for (std::size_t flat = 0; flat < next.size(); ++flat) {
            std::vector<int> idx = next.index_of(flat);
            const int i = idx[slot];
            double s = 0.0;
            for (int p = 0; p < n; ++p) {
                idx[slot] = p;
                s += a(p, i) * cur.at(idx);
            }
            next.data()[flat] = s;
        }
        cur = std::move(next);
    }
    return cur;
}

double InvariantResiduals::worst() const
{
    return std::max({antisymmetry, pair_symmetry, bianchi, reconstruction, weyl_trace});
}

InvariantResiduals curvature_invariants(const CurvatureData& c)
{
    InvariantResiduals r;
    const int n = c.dim;
    const Tensor& R = c.riemann;
    const double scale = 1.0 + max_abs(R);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    const double v = R(i, j, k, l);
                    r.antisymmetry = std::max({r.antisymmetry, std::abs(v + R(j, i, k, l)), std::abs(v + R(i, j, l, k))});
                    r.pair_symmetry = std::max(r.pair_symmetry, std::abs(v - R(k, l, i, j)));
                    r.bianchi = std::max(r.bianchi, std::abs(v + R(i, k, l, j) + R(i, l, j, k)));
                }
    if (n >= 3 && c.weyl.dim() == n) {
        Tensor rebuilt = weyl_free_part(c);
        for (std::size_t i = 0; i < rebuilt.size(); ++i) rebuilt.data()[i] += c.weyl.data()[i];
        r.reconstruction = max_abs(R - rebuilt);
        const std::array<std::pair<int, int>, 6> slots{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
        for (auto [s, t] : slots) {
            for (int x = 0; x < n; ++x)
                for (int y = 0; y < n; ++y) {
                    double sum = 0.0;
                    for (int k = 0; k < n; ++k) {
                        std::array<int, 4> idx{};
                        int free = 0;
                        for (int slot = 0; slot < 4; ++slot) {
                            if (slot == s || slot == t) idx[slot] = k;
                            else idx[slot] = free++ == 0 ? x : y;
                        }
                        sum += c.weyl.at(idx);
                    }
                    r.weyl_trace = std::max(r.weyl_trace, std::abs(sum));
                }
        }
    }
    r.antisymmetry /= scale;
    r.pair_symmetry /= scale;
    r.bianchi /= scale;
    r.reconstruction /= scale;
    r.weyl_trace /= scale;
    return r;
}

double first_structure_residual(const CoframeData& coframe, const ConnectionForms& conn)
{
    const int n = coframe.dim();
    const Eigen::MatrixXd b = values(coframe.b);
    const Tensor gamma = values(conn.gamma);
    double worst = 0.0, scale = 0.0;
    for (int beta = 0; beta < n; ++beta) {
        const Eigen::MatrixXd db = values(derivative(coframe.b, beta));
        for (int alpha = 0; alpha < n; ++alpha) {
            const Eigen::MatrixXd da = values(derivative(coframe.b, alpha));
            for (int i = 0; i < n; ++i) {
                const double d = db(i, alpha) - da(i, beta);
                double wedge = 0.0;
                for (int j = 0; j < n; ++j) wedge += gamma(i, j, beta) * b(j, alpha) - gamma(i, j, alpha) * b(j, beta);
                worst = std::max(worst, std::abs(d + wedge));
                scale = std::max(scale, std::abs(d));
            }
        }
    }
    return worst / (1.0 + scale);
}

namespace {

struct FirstOrderFrame {
    Eigen::MatrixXd b_inv;
    Tensor omega;
    Tensor gamma;
};

FirstOrderFrame first_order_frame(const MetricField& m, const ChartPoint& p)
{
    const CoframeData cf = orthonormal_coframe(metric_jets(m, p, 1));
    const ConnectionForms conn = connection_forms(cf);
    return {values(cf.b_inv), values(conn.omega), values(conn.gamma)};
}

void require_step(const ChartPoint& p, double h)
{
    if (!(h > 0.0) || h < 1e-12 * (1.0 + p.coords.cwiseAbs().maxCoeff()))
        throw DomainError("finite-difference step underflow");
}

// Richardson-extrapolated central difference of a tensor field along coordinate `axis`.
struct Difference {
    Tensor value;
    Tensor coarse;
    Tensor fine;
};

Difference coordinate_difference(const TensorField& f, const ChartPoint& p, int axis, double h)
{
    auto central = [&](double step) {
        Tensor plus = f(p.shifted(axis, step));
        Tensor minus = f(p.shifted(axis, -step));
        Tensor d = plus - minus;
        for (double& v : d.data()) v /= 2.0 * step;
        return d;
    };
    Difference d{Tensor(), central(h), central(h / 2.0)};
    d.value = d.fine;
    for (std::size_t i = 0; i < d.value.size(); ++i)
        d.value.data()[i] = (4.0 * d.fine.data()[i] - d.coarse.data()[i]) / 3.0;
    return d;
}

} // namespace

double second_structure_residual(const MetricField& m, const ChartPoint& p, double h)
{
    require_step(p, h);
    const Geometry geo = analyze(m, p);
    const int n = m.dim();
    TensorField gamma_field = [&m](const ChartPoint& q) { return first_order_frame(m, q).gamma; };
    Tensor dgamma(n, 4);
    for (int beta = 0; beta < n; ++beta) {
        const Tensor d = coordinate_difference(gamma_field, p, beta, h).value;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int a = 0; a < n; ++a) dgamma(i, j, a, beta) = d(i, j, a);
    }
    Tensor F = exterior_derivative_in_frame(dgamma, values(geo.coframe.b_inv));
    add_quadratic_term(F, values(geo.conn.omega));
    return max_abs(F - geo.curv.riemann) / (1.0 + max_abs(geo.curv.riemann));
}

CovariantDerivative covariant_derivative(const MetricField& m, const ChartPoint& p, const TensorField& field,
                                         double h)
{
    require_step(p, h);
    const int n = m.dim();
    const FirstOrderFrame frame = first_order_frame(m, p);
    const Tensor t0 = field(p);
    const int rank = t0.rank();

    std::vector<Difference> diffs;
    double coarse_gap = 0.0, fine_size = 0.0;
    for (int beta = 0; beta < n; ++beta) {
        diffs.push_back(coordinate_difference(field, p, beta, h));
        coarse_gap = std::max(coarse_gap, max_abs(diffs.back().coarse - diffs.back().fine));
        fine_size = std::max(fine_size, max_abs(diffs.back().fine));
    }

    CovariantDerivative out;
    out.value = Tensor(n, rank + 1);
    out.disagreement = coarse_gap;
    out.accuracy_warning = coarse_gap > 0.1 * fine_size + 1e-8;
    for (std::size_t flat = 0; flat < out.value.size(); ++flat) {
        std::vector<int> idx = out.value.index_of(flat);
        const int dir = idx.back();
        idx.pop_back();
        double s = 0.0;
        for (int beta = 0; beta < n; ++beta) s += frame.b_inv(beta, dir) * diffs[beta].value.at(idx);
        for (int slot = 0; slot < rank; ++slot) {
            const int i = idx[slot];
            for (int q = 0; q < n; ++q) {
                idx[slot] = q;
                s -= frame.omega(q, i, dir) * t0.at(idx);
            }
            idx[slot] = i;
        }
        out.value.data()[flat] = s;
    }
    return out;
}

Tensor anti_self_dual_part(const Tensor& w, int orientation)
{
    if (w.dim() != 4 || w.rank() != 4) throw DimensionError("anti-self-dual part is defined in dimension 4");
    Tensor P(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k)
                for (int l = 0; l < 4; ++l) {
                    const std::array<int, 4> idx{i, j, k, l};
                    const double id = (i == k && j == l ? 1.0 : 0.0) - (i == l && j == k ? 1.0 : 0.0);
                    P(i, j, k, l) = 0.5 * (id - orientation * permutation_sign(idx));
                }
    // Operators on 2-forms act by X(eta)_ij = 1/2 X_ijkl eta_kl, so each composition carries 1/2.
    Tensor tmp(4, 4), out(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int r = 0; r < 4; ++r)
                for (int s = 0; s < 4; ++s) {
                    double v = 0.0;
                    for (int p = 0; p < 4; ++p)
                        for (int q = 0; q < 4; ++q) v += P(i, j, p, q) * w(p, q, r, s);
                    tmp(i, j, r, s) = 0.5 * v;
                }
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k)
                for (int l = 0; l < 4; ++l) {
                    double v = 0.0;
                    for (int r = 0; r < 4; ++r)
                        for (int s = 0; s < 4; ++s) v += tmp(i, j, r, s) * P(r, s, k, l);
                    out(i, j, k, l) = 0.5 * v;
                }
    return out;
}

CovariantCurvature covariant_derivative_curvature(const MetricField& m, const ChartPoint& p, double h)
{
    CovariantCurvature out;
    const CovariantDerivative riem =
        covariant_derivative(m, p, [&m](const ChartPoint& q) { return curvature_at(m, q).riemann; }, h);
    out.nabla_riemann = riem.value;
    out.riemann_norm = squared_norm(riem.value);
    out.accuracy_warning = riem.accuracy_warning;
    if (m.dim() == 4) {
        const int o = m.orientation();
        const CovariantDerivative wm = covariant_derivative(
            m, p, [&m, o](const ChartPoint& q) { return anti_self_dual_part(curvature_at(m, q).weyl, o); }, h);
        out.nabla_weyl_minus = wm.value;
        out.weyl_minus_norm = squared_norm(wm.value);
        out.accuracy_warning = out.accuracy_warning || wm.accuracy_warning;
    }
    return out;
}

double laplacian(const MetricField& m, const ChartPoint& p, const std::function<double(const ChartPoint&)>& f,
                 double h)
{
    require_step(p, h);
    const int n = m.dim();
    const JetMatrix g = metric_jets(m, p, 1);
    const Eigen::MatrixXd G = values(g);
    const Eigen::MatrixXd Ginv = G.inverse();
    std::vector<Eigen::MatrixXd> dg;
    for (int a = 0; a < n; ++a) dg.push_back(values(derivative(g, a)));

    const double f0 = f(p);
    Eigen::VectorXd grad(n);
    Eigen::MatrixXd hess(n, n);
    for (int a = 0; a < n; ++a) {
        const double fp = f(p.shifted(a, h)), fm = f(p.shifted(a, -h));
        grad[a] = (fp - fm) / (2.0 * h);
        hess(a, a) = (fp - 2.0 * f0 + fm) / (h * h);
        for (int b = 0; b < a; ++b) {
            const ChartPoint pp = p.shifted(a, h).shifted(b, h), pm = p.shifted(a, h).shifted(b, -h);
            const ChartPoint mp = p.shifted(a, -h).shifted(b, h), mm = p.shifted(a, -h).shifted(b, -h);
            hess(a, b) = hess(b, a) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h * h);
        }
    }

    double out = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            double christoffel_term = 0.0;
            for (int c = 0; c < n; ++c) {
                double gamma = 0.0;
                for (int d = 0; d < n; ++d)
                    gamma += 0.5 * Ginv(c, d) * (dg[a](d, b) + dg[b](d, a) - dg[d](a, b));
                christoffel_term += gamma * grad[c];
            }
            out += Ginv(a, b) * (hess(a, b) - christoffel_term);
        }
    return out;
}

} // namespace tcurv
