#pragma once

#include "tcurv/expr.hpp"
#include "tcurv/jet.hpp"

#include <Eigen/Core>

#include <functional>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tcurv {

/// A point of a local chart.
struct ChartPoint {
    Eigen::VectorXd coords;

    ChartPoint() = default;
    explicit ChartPoint(Eigen::VectorXd c) : coords(std::move(c)) {}
    ChartPoint(std::initializer_list<double> c) : coords(static_cast<Eigen::Index>(c.size()))
    {
        Eigen::Index i = 0;
        for (double v : c) coords[i++] = v;
    }

    int dim() const noexcept { return static_cast<int>(coords.size()); }
    bool finite() const { return coords.allFinite(); }
    /// Copy displaced by `step` along coordinate `axis`.
    ChartPoint shifted(int axis, double step) const
    {
        ChartPoint p = *this;
        p.coords[axis] += step;
        return p;
    }
};

using Parameters = std::vector<std::pair<std::string, double>>;

/// A chart-local Riemannian metric g_ab(x).
///
/// The components are produced by an evaluator that maps coordinate jets to the
/// matrix of component jets, so that derivatives come from jet arithmetic. An
/// evaluator may consume derivatives internally (for instance when the metric is
/// built from connection forms of another metric); `derivative_loss` records how
/// many orders it loses.
class MetricField {
public:
    using Evaluator = std::function<JetMatrix(std::span<const Jet> coords)>;

    MetricField(std::string name, std::vector<std::string> coordinate_names, int orientation,
                Evaluator evaluator, int derivative_loss = 0);

    const std::string& name() const noexcept { return name_; }
    int dim() const noexcept { return static_cast<int>(coordinate_names_.size()); }
    const std::vector<std::string>& coordinate_names() const noexcept { return coordinate_names_; }
    /// +1 when dx^1 ^ ... ^ dx^n is positively oriented.
    int orientation() const noexcept { return orientation_; }
    int derivative_loss() const noexcept { return derivative_loss_; }

    const Parameters& parameters() const noexcept { return parameters_; }
    const std::vector<ChartPoint>& suggested_points() const noexcept { return suggested_points_; }
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

    MetricField& set_parameters(Parameters p);
    MetricField& set_suggested_points(std::vector<ChartPoint> pts);
    MetricField& add_warning(std::string w);

    /// Same field with the opposite orientation.
    MetricField with_orientation(int orientation) const;

    JetMatrix evaluate(std::span<const Jet> coords) const { return evaluator_(coords); }
    Eigen::MatrixXd values(const ChartPoint& p) const;

    /// Component expressions, for fields loaded from a metric document.
    const std::vector<std::vector<ExprPtr>>* expressions() const noexcept
    {
        return expressions_ ? &*expressions_ : nullptr;
    }
    void set_expressions(std::vector<std::vector<ExprPtr>> e) { expressions_ = std::move(e); }

private:
    std::string name_;
    std::vector<std::string> coordinate_names_;
    int orientation_;
    Evaluator evaluator_;
    int derivative_loss_;
    Parameters parameters_;
    std::vector<ChartPoint> suggested_points_;
    std::vector<std::string> warnings_;
    std::optional<std::vector<std::vector<ExprPtr>>> expressions_;
};

/// Parsed metric document.
struct MetricSpec {
    std::string name;
    int dim = 0;
    std::vector<std::string> coordinate_names;
    int orientation = 1;
    Parameters parameters;
    std::vector<std::vector<std::string>> component_text;
    std::vector<std::vector<ExprPtr>> components;
    std::vector<ChartPoint> suggested_points;
    std::vector<std::string> warnings;
};

/// Parses the metric document format (see docs/metric-format.md).
MetricSpec parse_metric_spec(std::string_view document);
/// Canonical document text; parse_metric_spec(serialize(s)) reproduces s.
std::string serialize(const MetricSpec& spec);
MetricField make_metric_field(const MetricSpec& spec);
MetricField load_metric_spec(std::string_view document);

struct CatalogEntry {
    std::string name;
    std::string description;
    Parameters defaults;
};

const std::vector<CatalogEntry>& catalog();
/// Catalog document with `overrides` applied to the default parameters.
MetricSpec builtin_spec(std::string_view name, const std::map<std::string, double>& overrides = {});
MetricField builtin(std::string_view name, const std::map<std::string, double>& overrides = {});

} // namespace tcurv
