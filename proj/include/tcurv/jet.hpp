#pragma once

// Truncated multivariate Taylor arithmetic.
//
// A Jet holds the Taylor coefficients c_alpha = (d^alpha f)(p) / alpha! of a scalar
// function of `dim` chart coordinates, for every multi-index alpha with
// |alpha| <= order. Arithmetic and the elementary functions propagate these
// coefficients exactly (up to floating point), so partial derivatives of metric
// components are available to machine precision without symbolic algebra.
//
// Monomials are stored in graded order (by total degree, then lexicographically),
// so the coefficients of a lower-order jet are a prefix of the higher-order ones.

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace tcurv {

inline constexpr int kMaxJetDim = 6;
inline constexpr int kMaxJetOrder = 3;

using MultiIndex = std::array<std::uint8_t, kMaxJetDim>;

class JetLayout {
public:
    JetLayout() = default;

    struct Product {
        int lhs;
        int rhs;
        int out;
    };
    struct Shift {
        int from;
        int to;
        double factor;
    };

    int dim() const noexcept { return dim_; }
    int order() const noexcept { return order_; }
    int size() const noexcept { return static_cast<int>(monomials_.size()); }

    const MultiIndex& monomial(int index) const { return monomials_[index]; }
    int degree(int index) const { return degrees_[index]; }
    /// Index of the monomial `alpha`, or -1 when |alpha| exceeds the order.
    int index_of(const MultiIndex& alpha) const;

    const std::vector<Product>& products() const noexcept { return products_; }
    /// Coefficient moves realising d/dx_var; targets index the (order - 1) layout.
    const std::vector<Shift>& derivative(int var) const { return derivatives_[var]; }

private:
    friend const JetLayout& jet_layout(int dim, int order);
    void build(int dim, int order);

    int dim_ = 0;
    int order_ = 0;
    std::vector<MultiIndex> monomials_;
    std::vector<int> degrees_;
    std::vector<int> lookup_;
    std::vector<Product> products_;
    std::array<std::vector<Shift>, kMaxJetDim> derivatives_;
};

/// Shared immutable layout for `dim` variables truncated at `order`.
const JetLayout& jet_layout(int dim, int order);

class Jet {
public:
    /// A layout-free constant. Combines with any jet.
    Jet() : coeffs_{0.0} {}
    Jet(double value) : coeffs_{value} {} // NOLINT(google-explicit-constructor)

    static Jet constant(const JetLayout& layout, double value);
    /// The coordinate function x_var with value `value` at the expansion point.
    static Jet variable(const JetLayout& layout, int var, double value);

    double value() const noexcept { return coeffs_[0]; }
    bool has_layout() const noexcept { return layout_ != nullptr; }
    const JetLayout* layout() const noexcept { return layout_; }
    int order() const noexcept { return layout_ ? layout_->order() : 0; }
    int dim() const noexcept { return layout_ ? layout_->dim() : 0; }

    /// Raw Taylor coefficient in graded monomial order.
    double taylor(int index) const;
    std::span<const double> coefficients() const noexcept { return coeffs_; }

    /// Mixed partial derivative d^alpha f at the expansion point.
    double partial(const MultiIndex& alpha) const;
    double partial(std::initializer_list<int> vars) const;

    /// d/dx_var as a jet of one order less.
    Jet derivative(int var) const;
    Jet truncated(int order) const;
    /// True when every derivative coefficient vanishes exactly.
    bool is_locally_constant() const noexcept;

    Jet& operator+=(const Jet& rhs);
    Jet& operator-=(const Jet& rhs);
    Jet& operator*=(const Jet& rhs);
    Jet& operator/=(const Jet& rhs);

    friend Jet operator-(Jet a);
    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(const Jet& a, const Jet& b);
    friend Jet operator/(const Jet& a, const Jet& b);

    /// Applies f(u0 + d) = sum_m series[m] d^m; series.size() must exceed order().
    friend Jet compose(const Jet& u, std::span<const double> series);
    friend Jet tan(const Jet& u);
    friend Jet tanh(const Jet& u);
    friend Jet pow(const Jet& base, const Jet& exponent);

private:
    const JetLayout* layout_ = nullptr;
    std::vector<double> coeffs_;
};

Jet exp(const Jet& u);
Jet log(const Jet& u);
Jet sqrt(const Jet& u);
Jet sin(const Jet& u);
Jet cos(const Jet& u);
Jet tan(const Jet& u);
Jet sinh(const Jet& u);
Jet cosh(const Jet& u);
Jet tanh(const Jet& u);
Jet reciprocal(const Jet& u);
/// Integer power by repeated multiplication; valid for any sign of the base.
Jet pow(const Jet& base, int exponent);
/// Real power; the base value must be positive unless the exponent is integral.
Jet pow(const Jet& base, double exponent);
/// exp(exponent * log(base)); requires a positive base.
Jet pow(const Jet& base, const Jet& exponent);

inline double value_of(double x) { return x; }
inline double value_of(const Jet& x) { return x.value(); }

} // namespace tcurv

namespace Eigen {

template <>
struct NumTraits<tcurv::Jet> : NumTraits<double> {
    using Real = tcurv::Jet;
    using NonInteger = tcurv::Jet;
    using Nested = tcurv::Jet;
    using Literal = tcurv::Jet;

    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 4,
        AddCost = 8,
        MulCost = 32
    };
};

} // namespace Eigen

namespace tcurv {

using JetMatrix = Eigen::Matrix<Jet, Eigen::Dynamic, Eigen::Dynamic>;

/// Component-wise values of a jet matrix.
Eigen::MatrixXd values(const JetMatrix& m);
/// Component-wise d/dx_var of a jet matrix.
JetMatrix derivative(const JetMatrix& m, int var);

} // namespace tcurv
