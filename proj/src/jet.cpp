#include "tcurv/jet.hpp"

#include "tcurv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tcurv {

namespace {

void enumerate_degree(int dim, int degree, int var, MultiIndex& current, std::vector<MultiIndex>& out)
{
    if (var == dim - 1) {
        current[var] = static_cast<std::uint8_t>(degree);
        out.push_back(current);
        current[var] = 0;
        return;
    }
    for (int k = degree; k >= 0; --k) {
        current[var] = static_cast<std::uint8_t>(k);
        enumerate_degree(dim, degree - k, var + 1, current, out);
    }
    current[var] = 0;
}

double factorial(int n)
{
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

} // namespace

void JetLayout::build(int dim, int order)
{
    dim_ = dim;
    order_ = order;
    monomials_.clear();
    for (int d = 0; d <= order; ++d) {
        MultiIndex current{};
        enumerate_degree(dim, d, 0, current, monomials_);
    }
    degrees_.resize(monomials_.size());
    int span = 1;
    for (int v = 0; v < dim; ++v) span *= order + 1;
    lookup_.assign(span, -1);
    for (int i = 0; i < size(); ++i) {
        int deg = 0;
        int key = 0;
        int base = 1;
        for (int v = 0; v < dim; ++v) {
            deg += monomials_[i][v];
            key += monomials_[i][v] * base;
            base *= order + 1;
        }
        degrees_[i] = deg;
        lookup_[key] = i;
    }
    products_.clear();
    for (int i = 0; i < size(); ++i) {
        for (int j = 0; j < size(); ++j) {
            if (degrees_[i] + degrees_[j] > order) continue;
            MultiIndex sum{};
            for (int v = 0; v < dim; ++v)
                sum[v] = static_cast<std::uint8_t>(monomials_[i][v] + monomials_[j][v]);
            products_.push_back({i, j, index_of(sum)});
        }
    }
    for (int v = 0; v < dim; ++v) {
        auto& shifts = derivatives_[v];
        shifts.clear();
        for (int i = 0; i < size(); ++i) {
            if (monomials_[i][v] == 0) continue;
            MultiIndex lower = monomials_[i];
            lower[v] -= 1;
            shifts.push_back({i, index_of(lower), static_cast<double>(monomials_[i][v])});
        }
    }
}

int JetLayout::index_of(const MultiIndex& alpha) const
{
    int key = 0;
    int base = 1;
    int deg = 0;
    for (int v = 0; v < dim_; ++v) {
        deg += alpha[v];
        if (alpha[v] > order_) return -1;
        key += alpha[v] * base;
        base *= order_ + 1;
    }
    for (int v = dim_; v < kMaxJetDim; ++v)
        if (alpha[v] != 0) return -1;
    if (deg > order_) return -1;
    return lookup_[key];
}

const JetLayout& jet_layout(int dim, int order)
{
    using Table = std::array<std::array<JetLayout, kMaxJetOrder + 1>, kMaxJetDim + 1>;
    static const Table table = [] {
        Table t;
        for (int d = 1; d <= kMaxJetDim; ++d)
            for (int k = 0; k <= kMaxJetOrder; ++k) t[d][k].build(d, k);
        return t;
    }();
    if (dim < 1 || dim > kMaxJetDim)
        throw DimensionError("jet dimension " + std::to_string(dim) + " outside [1, " +
                             std::to_string(kMaxJetDim) + "]");
    if (order < 0 || order > kMaxJetOrder)
        throw DimensionError("jet order " + std::to_string(order) + " outside [0, " +
                             std::to_string(kMaxJetOrder) + "]");
    return table[dim][order];
}

Jet Jet::constant(const JetLayout& layout, double value)
{
    Jet j;
    j.layout_ = &layout;
    j.coeffs_.assign(layout.size(), 0.0);
    j.coeffs_[0] = value;
    return j;
}

Jet Jet::variable(const JetLayout& layout, int var, double value)
{
    if (var < 0 || var >= layout.dim()) throw DimensionError("jet variable index out of range");
    Jet j = constant(layout, value);
    if (layout.order() >= 1) j.coeffs_[1 + var] = 1.0;
    return j;
}

double Jet::taylor(int index) const
{
    if (index < 0 || index >= static_cast<int>(coeffs_.size())) return 0.0;
    return coeffs_[index];
}

double Jet::partial(const MultiIndex& alpha) const
{
    int deg = 0;
    double scale = 1.0;
    for (int v = 0; v < kMaxJetDim; ++v) {
        deg += alpha[v];
        scale *= factorial(alpha[v]);
    }
    if (deg == 0) return value();
    if (!layout_) return 0.0;
    if (deg > layout_->order())
        throw DomainError("derivative of order " + std::to_string(deg) +
                          " requested from a jet of order " + std::to_string(layout_->order()));
    const int idx = layout_->index_of(alpha);
    return idx < 0 ? 0.0 : coeffs_[idx] * scale;
}

double Jet::partial(std::initializer_list<int> vars) const
{
    MultiIndex alpha{};
    for (int v : vars) {
        if (v < 0 || v >= kMaxJetDim) throw DimensionError("partial: variable index out of range");
        alpha[v] += 1;
    }
    return partial(alpha);
}

Jet Jet::derivative(int var) const
{
    if (!layout_) return Jet(0.0);
    if (var < 0 || var >= layout_->dim()) throw DimensionError("derivative: variable index out of range");
    if (layout_->order() == 0)
        throw DomainError("cannot differentiate an order-0 jet");
    const JetLayout& lower = jet_layout(layout_->dim(), layout_->order() - 1);
    Jet d = constant(lower, 0.0);
    for (const auto& s : layout_->derivative(var)) d.coeffs_[s.to] += s.factor * coeffs_[s.from];
    return d;
}

Jet Jet::truncated(int order) const
{
    if (!layout_ || order >= layout_->order()) return *this;
    const JetLayout& lower = jet_layout(layout_->dim(), std::max(order, 0));
    Jet t;
    t.layout_ = &lower;
    t.coeffs_.assign(coeffs_.begin(), coeffs_.begin() + lower.size());
    return t;
}

bool Jet::is_locally_constant() const noexcept
{
    return std::all_of(coeffs_.begin() + 1, coeffs_.end(), [](double c) { return c == 0.0; });
}

namespace {

// Brings two jets onto a common layout (the lower order of the two).
const JetLayout* common_layout(const Jet& a, const Jet& b)
{
    const JetLayout* la = a.layout();
    const JetLayout* lb = b.layout();
    if (!la) return lb;
    if (!lb) return la;
    if (la->dim() != lb->dim())
        throw DimensionError("jets over " + std::to_string(la->dim()) + " and " +
                             std::to_string(lb->dim()) + " variables cannot be combined");
    return la->order() <= lb->order() ? la : lb;
}

} // namespace

Jet& Jet::operator+=(const Jet& rhs)
{
    if (!rhs.layout_) {
        coeffs_[0] += rhs.coeffs_[0];
        return *this;
    }
    const JetLayout* target = common_layout(*this, rhs);
    if (!layout_) {
        const double v = coeffs_[0];
        *this = rhs.truncated(target->order());
        coeffs_[0] += v;
        return *this;
    }
    if (target != layout_) *this = truncated(target->order());
    for (int i = 0; i < target->size(); ++i) coeffs_[i] += rhs.coeffs_[i];
    return *this;
}

Jet& Jet::operator-=(const Jet& rhs) { return *this += -rhs; }

Jet operator-(Jet a)
{
    for (double& c : a.coeffs_) c = -c;
    return a;
}

Jet operator*(const Jet& a, const Jet& b)
{
    if (!b.layout_) {
        Jet r = a;
        for (double& c : r.coeffs_) c *= b.coeffs_[0];
        return r;
    }
    if (!a.layout_) {
        Jet r = b;
        for (double& c : r.coeffs_) c *= a.coeffs_[0];
        return r;
    }
    const JetLayout* target = common_layout(a, b);
    Jet r = Jet::constant(*target, 0.0);
    const double* pa = a.coeffs_.data();
    const double* pb = b.coeffs_.data();
    double* out = r.coeffs_.data();
    for (const auto& p : target->products()) out[p.out] += pa[p.lhs] * pb[p.rhs];
    return r;
}

Jet& Jet::operator*=(const Jet& rhs) { return *this = *this * rhs; }

Jet operator/(const Jet& a, const Jet& b)
{
    if (!b.layout_) {
        if (b.coeffs_[0] == 0.0) throw DomainError("division by zero");
        Jet r = a;
        for (double& c : r.coeffs_) c /= b.coeffs_[0];
        return r;
    }
    Jet r = a * reciprocal(b);
    r.coeffs_[0] = a.coeffs_[0] / b.coeffs_[0];
    return r;
}

Jet& Jet::operator/=(const Jet& rhs) { return *this = *this / rhs; }

Jet compose(const Jet& u, std::span<const double> series)
{
    if (!u.layout_) return Jet(series[0]);
    const int k = u.layout_->order();
    Jet delta = u;
    delta.coeffs_[0] = 0.0;
    Jet r = Jet::constant(*u.layout_, series[k]);
    for (int m = k - 1; m >= 0; --m) {
        r = r * delta;
        r.coeffs_[0] += series[m];
    }
    return r;
}

namespace {

using Series = std::array<double, kMaxJetOrder + 1>;

// Kept out of line so the compiler cannot fuse sin and cos into sincos, whose last
// bit may differ from the plain calls used by double evaluation.
[[gnu::noinline]] double sin_value(double x) { return std::sin(x); }
[[gnu::noinline]] double cos_value(double x) { return std::cos(x); }
[[gnu::noinline]] double sinh_value(double x) { return std::sinh(x); }
[[gnu::noinline]] double cosh_value(double x) { return std::cosh(x); }

void require_finite(double v, const char* fn)
{
    if (!std::isfinite(v)) throw DomainError(std::string(fn) + ": non-finite result");
}

Series power_series(double u0, double r, int k)
{
    Series s{};
    double binom = 1.0;
    for (int m = 0; m <= k; ++m) {
        if (m > 0) binom *= (r - (m - 1)) / m;
        s[m] = binom == 0.0 ? 0.0 : binom * std::pow(u0, r - m);
    }
    return s;
}

} // namespace

Jet exp(const Jet& u)
{
    const int k = u.order();
    const double e = std::exp(u.value());
    require_finite(e, "exp");
    Series s{};
    for (int m = 0; m <= k; ++m) s[m] = e / factorial(m);
    return compose(u, s);
}

Jet log(const Jet& u)
{
    const double u0 = u.value();
    if (!(u0 > 0.0)) throw DomainError("log of non-positive value " + std::to_string(u0));
    const int k = u.order();
    Series s{};
    s[0] = std::log(u0);
    for (int m = 1; m <= k; ++m) s[m] = ((m % 2) ? 1.0 : -1.0) / (m * std::pow(u0, m));
    return compose(u, s);
}

Jet sqrt(const Jet& u)
{
    const double u0 = u.value();
    const int k = u.order();
    if (u0 < 0.0 || (u0 == 0.0 && k > 0))
        throw DomainError("sqrt of value " + std::to_string(u0) + " outside the differentiable domain");
    if (k == 0) return compose(u, Series{std::sqrt(u0)});
    return compose(u, power_series(u0, 0.5, k));
}

Jet reciprocal(const Jet& u)
{
    const double u0 = u.value();
    if (u0 == 0.0) throw DomainError("division by zero");
    const int k = u.order();
    Series s{};
    double p = 1.0 / u0;
    for (int m = 0; m <= k; ++m) {
        s[m] = (m % 2 ? -p : p);
        p /= u0;
    }
    return compose(u, s);
}

Jet sin(const Jet& u)
{
    const double sv = sin_value(u.value()), cv = cos_value(u.value());
    const double cycle[4] = {sv, cv, -sv, -cv};
    Series s{};
    for (int m = 0; m <= u.order(); ++m) s[m] = cycle[m % 4] / factorial(m);
    return compose(u, s);
}

Jet cos(const Jet& u)
{
    const double sv = sin_value(u.value()), cv = cos_value(u.value());
    const double cycle[4] = {cv, -sv, -cv, sv};
    Series s{};
    for (int m = 0; m <= u.order(); ++m) s[m] = cycle[m % 4] / factorial(m);
    return compose(u, s);
}

Jet tan(const Jet& u)
{
    if (std::cos(u.value()) == 0.0) throw DomainError("tan at a pole");
    Jet r = sin(u) / cos(u);
    r.coeffs_[0] = std::tan(u.value());
    return r;
}

Jet sinh(const Jet& u)
{
    const double sh = sinh_value(u.value()), ch = cosh_value(u.value());
    require_finite(ch, "sinh");
    Series s{};
    for (int m = 0; m <= u.order(); ++m) s[m] = (m % 2 ? ch : sh) / factorial(m);
    return compose(u, s);
}

Jet cosh(const Jet& u)
{
    const double sh = sinh_value(u.value()), ch = cosh_value(u.value());
    require_finite(ch, "cosh");
    Series s{};
    for (int m = 0; m <= u.order(); ++m) s[m] = (m % 2 ? sh : ch) / factorial(m);
    return compose(u, s);
}

Jet tanh(const Jet& u)
{
    Jet r = sinh(u) / cosh(u);
    r.coeffs_[0] = std::tanh(u.value());
    return r;
}

Jet pow(const Jet& base, int exponent)
{
    if (exponent < 0) return reciprocal(pow(base, -exponent));
    Jet result = base.has_layout() ? Jet::constant(*base.layout(), 1.0) : Jet(1.0);
    Jet square = base;
    unsigned n = static_cast<unsigned>(exponent);
    while (n) {
        if (n & 1u) result *= square;
        n >>= 1u;
        if (n) square *= square;
    }
    return result;
}

Jet pow(const Jet& base, double exponent)
{
    if (std::nearbyint(exponent) == exponent && std::abs(exponent) <= 1 << 20)
        return pow(base, static_cast<int>(exponent));
    const double u0 = base.value();
    if (!(u0 > 0.0))
        throw DomainError("non-integer power of non-positive base " + std::to_string(u0));
    return compose(base, power_series(u0, exponent, base.order()));
}

Jet pow(const Jet& base, const Jet& exponent)
{
    if (exponent.is_locally_constant()) return pow(base, exponent.value());
    if (!(base.value() > 0.0))
        throw DomainError("variable power of non-positive base " + std::to_string(base.value()));
    Jet r = exp(exponent * log(base));
    r.coeffs_[0] = std::pow(base.value(), exponent.value());
    return r;
}

Eigen::MatrixXd values(const JetMatrix& m)
{
    return m.unaryExpr([](const Jet& j) { return j.value(); });
}

JetMatrix derivative(const JetMatrix& m, int var)
{
    return m.unaryExpr([var](const Jet& j) { return j.derivative(var); });
}

} // namespace tcurv
