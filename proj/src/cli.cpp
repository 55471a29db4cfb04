#include "tcurv/cli.hpp"

#include "tcurv/blocks.hpp"
#include "tcurv/errors.hpp"
#include "tcurv/geom.hpp"
#include "tcurv/metric.hpp"
#include "tcurv/twistor.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>

namespace tcurv::cli {

namespace {

using json = nlohmann::ordered_json;

class InputError : public Error {
public:
    using Error::Error;
};

struct Options {
    std::string metric;
    std::string spec;
    std::vector<std::string> params;
    std::vector<std::string> points;
    std::optional<double> tol;
    double t = 1.0;
    int samples = 64;
    int orientation = 0;
    std::string format;
    std::string suite = "all";
};

// ---------------------------------------------------------------------------
// Output

std::string format_double(double v)
{
    if (!std::isfinite(v)) throw DomainError("non-finite value in report");
    if (v == 0.0) v = 0.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_json(std::ostream& os, const json& j, int indent = 0)
{
    const std::string pad(static_cast<std::size_t>(indent) + 2, ' ');
    const std::string close(static_cast<std::size_t>(indent), ' ');
    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) {
            os << "{}";
            return;
        }
        os << "{\n";
        bool first = true;
        for (const auto& [key, value] : j.items()) {
            if (!first) os << ",\n";
            first = false;
            os << pad << json(key).dump() << ": ";
            write_json(os, value, indent + 2);
        }
        os << '\n' << close << '}';
        return;
    }
    case json::value_t::array: {
        const bool flat = std::none_of(j.begin(), j.end(), [](const json& e) { return e.is_structured(); });
        if (j.empty()) {
            os << "[]";
        } else if (flat) {
            os << '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) os << ", ";
                write_json(os, j[i], indent);
            }
            os << ']';
        } else {
            os << "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) os << ",\n";
                os << pad;
                write_json(os, j[i], indent + 2);
            }
            os << '\n' << close << ']';
        }
        return;
    }
    case json::value_t::number_float:
        os << format_double(j.get<double>());
        return;
    default:
        os << j.dump();
    }
}

json matrix_json(const Eigen::MatrixXd& m)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_json(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json conventions(int orientation)
{
    return {
        {"orientation", orientation},
        {"curvatureSign", "unit round sphere has sectional curvature +1"},
        {"ricci", "Ric_ij = R_kikj"},
        {"blockBasis", "pattern/unnormalized: e12 + s e34, e13 + s e42, e14 + s e23"},
        {"weylNorm", "operator: sum of squared eigenvalues of the Weyl block; tensor norm is 4x"},
        {"twistorFrame", "negatively oriented; fourth frame vector reversed when orientation is +1"},
        {"verticalScale", kVerticalScale},
        {"fiberChart", "stereographic from -n0, n0 = (1, 0, 0)"},
    };
}

json metric_json(const MetricField& m, const std::string& source)
{
    json params = json::object();
    for (const auto& [k, v] : m.parameters()) params[k] = v;
    return {
        {"name", m.name()},      {"source", source},          {"dim", m.dim()},
        {"coordinates", m.coordinate_names()}, {"orientation", m.orientation()}, {"params", params},
        {"warnings", m.warnings()},
    };
}

json report_header(const std::string& command, const MetricField& m, const std::string& source)
{
    return {
        {"toolVersion", kToolVersion},
        {"command", command},
        {"metric", metric_json(m, source)},
        {"conventions", conventions(m.orientation())},
    };
}

// ---------------------------------------------------------------------------
// Inputs

double parse_number(const std::string& text, const std::string& what)
{
    const char* begin = text.data();
    const char* end = begin + text.size();
    while (begin < end && *begin == ' ') ++begin;
    while (end > begin && end[-1] == ' ') --end;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end || begin == end || !std::isfinite(v))
        throw InputError("invalid number '" + text + "' in " + what);
    return v;
}

std::map<std::string, double> parse_params(const std::vector<std::string>& items)
{
    std::map<std::string, double> out;
    for (const auto& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw InputError("--param expects key=value, got '" + item + "'");
        out[item.substr(0, eq)] = parse_number(item.substr(eq + 1), "--param");
    }
    return out;
}

ChartPoint parse_point(const std::string& text, int dim)
{
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) values.push_back(parse_number(item, "--point"));
    if (static_cast<int>(values.size()) != dim)
        throw InputError("--point '" + text + "' has " + std::to_string(values.size()) + " coordinates, expected " +
                         std::to_string(dim));
    return ChartPoint(Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size())));
}

struct Source {
    MetricField metric;
    std::string kind;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read metric file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

MetricField resolve_named(const std::string& name, const std::map<std::string, double>& overrides, int orientation)
{
    MetricField m = builtin(name, overrides);
    return orientation != 0 ? m.with_orientation(orientation) : m;
}

Source resolve(const Options& o)
{
    if (o.metric.empty() == o.spec.empty()) throw InputError("give either a catalog metric name or --spec FILE");
    const auto overrides = parse_params(o.params);
    if (!o.metric.empty()) return {resolve_named(o.metric, overrides, o.orientation), "catalog"};

    MetricSpec spec = parse_metric_spec(read_file(o.spec));
    for (const auto& [key, value] : overrides) {
        auto it = std::find_if(spec.parameters.begin(), spec.parameters.end(),
                               [&key](const auto& p) { return p.first == key; });
        if (it == spec.parameters.end()) throw SpecError("unknown parameter '" + key + "'");
        it->second = value;
    }
    MetricField m = make_metric_field(spec);
    if (o.orientation != 0) m = m.with_orientation(o.orientation);
    return {std::move(m), "file"};
}

std::vector<ChartPoint> points_for(const MetricField& m, const Options& o)
{
    std::vector<ChartPoint> pts;
    for (const auto& text : o.points) pts.push_back(parse_point(text, m.dim()));
    if (pts.empty()) pts = m.suggested_points();
    if (pts.empty()) throw InputError("metric '" + m.name() + "' has no suggested points; pass --point");
    return pts;
}

void require_positive_t(double t)
{
    if (!(t > 0.0)) throw DomainError("twistor parameter t must be positive");
}

// ---------------------------------------------------------------------------
// classify

json classification_json(const Classification& c)
{
    return {
        {"einstein", c.einstein},
        {"selfDual", c.self_dual},
        {"antiSelfDual", c.anti_self_dual},
        {"weylFlat", c.weyl_flat},
        {"einsteinResidual", c.einstein_residual},
        {"selfDualResidual", c.self_dual_residual},
        {"antiSelfDualResidual", c.anti_self_dual_residual},
    };
}

json spectral_json(const SpectralReport& r)
{
    return {
        {"weylMinusEigenvalues", vector_json(Eigen::VectorXd(r.weyl_minus_eigen))},
        {"weylPlusEigenvalues", vector_json(Eigen::VectorXd(r.weyl_plus_eigen))},
        {"weylMinusDet", r.weyl_minus_det},
        {"weylMinusNorm", r.weyl_minus_norm},
        {"normConvention", r.norm_convention},
        {"laplacianTerm", r.laplacian_term},
        {"gradientTerm", r.gradient_term},
        {"bochnerResidual", std::abs(r.bochner_residual)},
        {"derdzinskiFactor", r.derdzinski_factor},
        {"accuracyWarning", r.accuracy_warning},
    };
}

int cmd_classify(const Options& o, std::ostream& out)
{
    const Source src = resolve(o);
    const MetricField& m = src.metric;
    require_positive_t(o.t);
    const double tol = o.tol.value_or(1e-9);
    const int orient = m.orientation();

    json report = report_header("classify", m, src.kind);
    report["tol"] = tol;
    json points = json::array();
    bool einstein = true, self_dual = true, anti_self_dual = true, weyl_flat = true;
    bool fiber_constant = true, integrable = true;
    for (const ChartPoint& p : points_for(m, o)) {
        const CurvatureData curv = curvature_at(m, p);
        const BlockData blocks = curvature_blocks(curv, orient);
        const Classification c = classify(blocks, tol);
        const SpectralReport spec = spectral_report(m, p, orient);
        const FiberScan scan = fiber_scan(curv, orient, o.t, o.samples);
        const OneillVerdict oneill = oneill_scan(curv, orient, o.t, o.samples);
        const double sbar = twistor_scalar(curv.scalar, q_tensors(twistor_frame(curv.riemann, orient)), o.t);

        einstein = einstein && c.einstein;
        self_dual = self_dual && c.self_dual;
        anti_self_dual = anti_self_dual && c.anti_self_dual;
        weyl_flat = weyl_flat && c.weyl_flat;
        fiber_constant = fiber_constant && scan.constant;
        integrable = integrable && oneill.integrable;

        points.push_back({
            {"coords", vector_json(p.coords)},
            {"scalar", curv.scalar},
            {"classification", classification_json(c)},
            {"blocks", {{"A", matrix_json(blocks.A)}, {"B", matrix_json(blocks.B)}, {"C", matrix_json(blocks.C)},
                        {"basisConvention", blocks.basis_convention}}},
            {"spectral", spectral_json(spec)},
            {"twistor", {{"t", o.t}, {"scalarFormula", sbar}, {"fiberMin", scan.min}, {"fiberMax", scan.max},
                         {"fiberConstant", scan.constant}, {"oneillMax", oneill.max_abs},
                         {"integrable", oneill.integrable}}},
        });
    }
    report["points"] = std::move(points);
    report["summary"] = {
        {"einstein", einstein},       {"selfDual", self_dual},           {"antiSelfDual", anti_self_dual},
        {"weylFlat", weyl_flat},      {"fiberConstant", fiber_constant}, {"integrable", integrable},
    };
    write_json(out, report);
    out << '\n';
    return kOk;
}

// ---------------------------------------------------------------------------
// twistor-scan

int cmd_twistor_scan(const Options& o, std::ostream& out)
{
    const Source src = resolve(o);
    const MetricField& m = src.metric;
    require_positive_t(o.t);
    if (o.points.size() > 1) throw InputError("twistor-scan takes at most one --point");
    const ChartPoint p = points_for(m, o).front();
    const double tol = o.tol.value_or(1e-7);
    const CurvatureData curv = curvature_at(m, p);
    const FiberScan scan = fiber_scan(curv, m.orientation(), o.t, o.samples, tol);

    if (o.format == "csv") {
        out << "nx,ny,nz,scalar\n";
        for (const auto& s : scan.samples)
            out << format_double(s.point.n.x()) << ',' << format_double(s.point.n.y()) << ','
                << format_double(s.point.n.z()) << ',' << format_double(s.scalar) << '\n';
        out << "# min=" << format_double(scan.min) << ",max=" << format_double(scan.max)
            << ",mean=" << format_double(scan.mean) << ",spread=" << format_double(scan.spread)
            << ",fiberConstant=" << (scan.constant ? "true" : "false") << '\n';
        return kOk;
    }

    json report = report_header("twistor-scan", m, src.kind);
    report["point"] = vector_json(p.coords);
    report["t"] = o.t;
    report["tol"] = tol;
    json rows = json::array();
    for (const auto& s : scan.samples)
        rows.push_back({{"nx", s.point.n.x()}, {"ny", s.point.n.y()}, {"nz", s.point.n.z()}, {"scalar", s.scalar}});
    report["rows"] = std::move(rows);
    report["summary"] = {{"min", scan.min},       {"max", scan.max},
                         {"mean", scan.mean},     {"spread", scan.spread},
                         {"fiberConstant", scan.constant}};
    write_json(out, report);
    out << '\n';
    return kOk;
}

// ---------------------------------------------------------------------------
// twistor-ricci

std::vector<ChartPoint> chart_points_for(const TwistorChart& chart, const Options& o)
{
    const int base_dim = chart.base.dim();
    std::vector<ChartPoint> pts;
    for (const auto& text : o.points) {
        const auto count = std::count(text.begin(), text.end(), ',') + 1;
        if (count == base_dim) pts.push_back(chart_point(parse_point(text, base_dim), 0.0, 0.0));
        else pts.push_back(parse_point(text, base_dim + 2));
    }
    if (pts.empty()) pts = chart.chart.suggested_points();
    return pts;
}

int cmd_twistor_ricci(const Options& o, std::ostream& out)
{
    const Source src = resolve(o);
    const MetricField& m = src.metric;
    require_positive_t(o.t);
    if (m.dim() != 4) throw DimensionError("twistor spaces need a four-dimensional base");
    const double tol = o.tol.value_or(1e-5);
    const int orient = m.orientation();
    const TwistorChart chart = build_twistor_chart(m, o.t);

    json report = report_header("twistor-ricci", m, src.kind);
    report["t"] = o.t;
    report["tol"] = tol;
    json points = json::array();
    double max_einstein = 0.0, max_parallel = 0.0, max_cross = 0.0, max_oneill = 0.0;
    bool fiber_constant = true, warning = false;
    for (const ChartPoint& p6 : chart_points_for(chart, o)) {
        const ChartPoint base_point(p6.coords.head(4));
        const double u = p6.coords[4], v = p6.coords[5];
        const CurvatureData curv = curvature_at(m, base_point);
        const Tensor R = twistor_frame(curv.riemann, orient);
        const double formula =
            twistor_scalar(curv.scalar, q_tensors(rotate(R, fiber_point(stereographic_point(u, v)).rotation.a)), o.t);
        const TwistorRicci tr = twistor_ricci_analysis(chart, p6);
        const FiberScan scan = fiber_scan(curv, orient, o.t, o.samples);
        const OneillVerdict oneill = oneill_scan(curv, orient, o.t, o.samples);

        max_einstein = std::max(max_einstein, tr.einstein_residual);
        max_parallel = std::max(max_parallel, tr.ricci_parallel_residual);
        max_cross = std::max(max_cross, std::abs(formula - tr.scalar_engine));
        max_oneill = std::max(max_oneill, oneill.max_abs);
        fiber_constant = fiber_constant && scan.constant;
        warning = warning || tr.accuracy_warning;

        points.push_back({
            {"coords", vector_json(p6.coords)},
            {"scalarFormula", formula},
            {"scalarEngine", tr.scalar_engine},
            {"scalarCross", std::abs(formula - tr.scalar_engine)},
            {"einsteinResidual", tr.einstein_residual},
            {"ricciParallelResidual", tr.ricci_parallel_residual},
            {"totallyGeodesicResidual", tr.totally_geodesic_residual},
            {"oneillNormSq", tr.oneill_norm_sq},
            {"fiberConstant", scan.constant},
            {"integrable", oneill.integrable},
            {"accuracyWarning", tr.accuracy_warning},
        });
    }
    report["points"] = std::move(points);
    report["summary"] = {
        {"einsteinResidual", max_einstein},
        {"ricciParallelResidual", max_parallel},
        {"scalarCross", max_cross},
        {"oneillMax", max_oneill},
        {"einstein", max_einstein <= 1e-6},
        {"ricciParallel", max_parallel <= tol},
        {"fiberConstant", fiber_constant},
        {"integrable", max_oneill <= 1e-8},
        {"accuracyWarning", warning},
    };
    write_json(out, report);
    out << '\n';
    return kOk;
}

// ---------------------------------------------------------------------------
// verify

struct Check {
    std::string suite;
    std::string metric;
    std::string name;
    double residual = 0.0;
    double tol = 0.0;
    bool expect_small = true; // pass when residual <= tol; otherwise when residual > tol
    bool pass() const { return expect_small ? residual <= tol : residual > tol; }
};

class Checks {
public:
    explicit Checks(std::string metric) : metric_(std::move(metric)) {}
    void suite(std::string s) { suite_ = std::move(s); }
    void add(std::string name, double residual, double tol, bool expect_small = true)
    {
        list_.push_back({suite_, metric_, std::move(name), residual, tol, expect_small});
    }
    std::vector<Check>& list() { return list_; }

private:
    std::string metric_;
    std::string suite_;
    std::vector<Check> list_;
};

std::string point_tag(std::size_t k) { return "@p" + std::to_string(k); }

void suite_invariants(const MetricField& m, const std::vector<ChartPoint>& pts, Checks& checks)
{
    checks.suite("invariants");
    for (std::size_t k = 0; k < pts.size(); ++k) {
        const Geometry geo = analyze(m, pts[k]);
        checks.add("curvature-symmetries" + point_tag(k), curvature_invariants(geo.curv).worst(), 1e-9);
        checks.add("first-structure" + point_tag(k), first_structure_residual(geo.coframe, geo.conn), 1e-9);
        checks.add("second-structure" + point_tag(k), second_structure_residual(m, pts[k]), 1e-9);
    }
}

Eigen::Matrix4d random_rotation(std::mt19937_64& rng)
{
    std::normal_distribution<double> normal;
    Eigen::Matrix4d x;
    for (int i = 0; i < 16; ++i) x(i) = normal(rng);
    Eigen::HouseholderQR<Eigen::Matrix4d> qr(x);
    Eigen::Matrix4d q = qr.householderQ();
    if (q.determinant() < 0.0) q.col(0) *= -1.0;
    return q;
}

void suite_blocks(const MetricField& m, const std::vector<ChartPoint>& pts, Checks& checks)
{
    checks.suite("blocks");
    const int o = m.orientation();
    std::mt19937_64 rng(0x5eed);
    for (std::size_t k = 0; k < pts.size(); ++k) {
        const CurvatureData curv = curvature_at(m, pts[k]);
        const BlockData blocks = curvature_blocks(curv, o);
        const double scale = 1.0 + blocks.max_entry();
        double trace = std::max(std::abs(blocks.A.trace() - blocks.S / 4.0), std::abs(blocks.C.trace() - blocks.S / 4.0));
        checks.add("block-traces" + point_tag(k), trace / scale, 1e-9);

        double equivariance = 0.0, homomorphism = 0.0;
        for (int r = 0; r < 10; ++r) {
            const Eigen::Matrix4d a = random_rotation(rng);
            const Eigen::Matrix4d b = random_rotation(rng);
            CurvatureData rotated = curv;
            rotated.riemann = rotate(curv.riemann, a);
            const BlockData direct = curvature_blocks(rotated, o);
            const BlockData law = rotate_blocks(blocks, mu_homomorphism(a, o));
            equivariance = std::max(equivariance, (direct.assembled() - law.assembled()).cwiseAbs().maxCoeff() / scale);
            const FrameRotation ma = mu_homomorphism(a, o), mb = mu_homomorphism(b, o), mab = mu_homomorphism(a * b, o);
            homomorphism = std::max({homomorphism, (mab.a_plus - ma.a_plus * mb.a_plus).cwiseAbs().maxCoeff(),
                                     (mab.a_minus - ma.a_minus * mb.a_minus).cwiseAbs().maxCoeff()});
        }
        checks.add("equivariance" + point_tag(k), equivariance, 1e-9);
        checks.add("mu-homomorphism" + point_tag(k), homomorphism, 1e-12);
    }
    const FrameRotation minus = mu_homomorphism(-Eigen::Matrix4d::Identity(), o);
    checks.add("mu-kernel", std::max((minus.a_plus - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(),
                                     (minus.a_minus - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff()),
               1e-15);
}

void suite_identities(const MetricField& m, const std::vector<ChartPoint>& pts, double t, Checks& checks)
{
    checks.suite("identities");
    for (std::size_t k = 0; k < pts.size(); ++k) {
        const CurvatureData curv = curvature_at(m, pts[k]);
        const double scale = 1.0 + curv.scalar * curv.scalar / 12.0 + squared_norm(curv.weyl);
        const IdentityResiduals id = verify_identities(m, pts[k], t);
        checks.add("weyl-minus-q-norms" + point_tag(k), id.weyl_minus_norm / scale, 1e-9);
        if (id.einstein_applicable) {
            checks.add("einstein-q-diagonal" + point_tag(k), id.einstein_q / scale, 1e-9);
            const SpectralReport r = spectral_report(m, pts[k], m.orientation());
            checks.add("bochner-weitzenboeck" + point_tag(k), std::abs(r.bochner_residual), 1e-6);
        }
        checks.add("twistor-scalar-cross" + point_tag(k), id.scalar_cross, 1e-6);
    }
}

void suite_twistor(const MetricField& m, const std::vector<ChartPoint>& pts, double t, int samples, Checks& checks)
{
    checks.suite("twistor");
    const int o = m.orientation();
    const TwistorChart chart = build_twistor_chart(m, t);
    bool predicted_constant = true, predicted_integrable = true;
    double spread = 0.0, oneill = 0.0, cross = 0.0, einstein = 0.0, parallel = 0.0;
    for (const ChartPoint& p : pts) {
        const CurvatureData curv = curvature_at(m, p);
        const BlockData blocks = curvature_blocks(curv, o);
        const Classification c = classify(blocks);
        const bool self_dual_einstein = c.einstein && c.self_dual;
        predicted_constant = predicted_constant && self_dual_einstein;
        predicted_integrable =
            predicted_integrable && self_dual_einstein && std::abs(curv.scalar) <= 1e-9 * (1.0 + blocks.max_entry());
        spread = std::max(spread, fiber_scan(curv, o, t, samples).spread);
        oneill = std::max(oneill, oneill_scan(curv, o, t, samples).max_abs);

        const Tensor R = twistor_frame(curv.riemann, o);
        for (const auto& [u, v] : {std::pair{0.0, 0.0}, std::pair{0.5, 0.4}, std::pair{-0.7, 0.1}}) {
            const TwistorRicci tr = twistor_ricci_analysis(chart, chart_point(p, u, v));
            const double formula =
                twistor_scalar(curv.scalar, q_tensors(rotate(R, fiber_point(stereographic_point(u, v)).rotation.a)), t);
            cross = std::max(cross, std::abs(formula - tr.scalar_engine));
            einstein = std::max(einstein, tr.einstein_residual);
            parallel = std::max(parallel, tr.ricci_parallel_residual);
        }
    }
    // Ricci parallel exactly when Einstein or when the base is self-dual and Ricci-flat.
    const bool predicted_parallel = predicted_integrable || einstein <= 1e-6;
    checks.add(std::string("fiber-constant=") + (predicted_constant ? "true" : "false"), spread, 1e-7,
               predicted_constant);
    checks.add(std::string("integrable=") + (predicted_integrable ? "true" : "false"), oneill, 1e-8,
               predicted_integrable);
    checks.add(std::string("ricci-parallel=") + (predicted_parallel ? "true" : "false"), parallel, 1e-5,
               predicted_parallel);
    checks.add("scalar-formula-vs-engine", cross, 1e-6);
}

int cmd_verify(const Options& o, std::ostream& out)
{
    require_positive_t(o.t);
    static const std::vector<std::string> suites{"invariants", "blocks", "identities", "twistor"};
    std::vector<std::string> wanted;
    if (o.suite == "all") wanted = suites;
    else wanted.push_back(o.suite);

    std::vector<Source> sources;
    if (o.metric == "all" && o.spec.empty()) {
        const auto overrides = parse_params(o.params);
        if (!overrides.empty()) throw InputError("--param cannot be combined with 'all'");
        for (const auto& e : catalog()) sources.push_back({resolve_named(e.name, {}, o.orientation), "catalog"});
    } else {
        sources.push_back(resolve(o));
    }

    std::vector<Check> all;
    for (const Source& src : sources) {
        const MetricField& m = src.metric;
        const std::vector<ChartPoint> pts = points_for(m, o);
        Checks checks(m.name());
        for (const auto& s : wanted) {
            if (s != "invariants" && m.dim() != 4) continue;
            if (s == "invariants") suite_invariants(m, pts, checks);
            if (s == "blocks") suite_blocks(m, pts, checks);
            if (s == "identities") suite_identities(m, pts, o.t, checks);
            if (s == "twistor") suite_twistor(m, pts, o.t, o.samples, checks);
        }
        all.insert(all.end(), checks.list().begin(), checks.list().end());
    }

    const auto failed = std::count_if(all.begin(), all.end(), [](const Check& c) { return !c.pass(); });
    if (o.format == "json") {
        json report = {{"toolVersion", kToolVersion}, {"command", "verify"}, {"suite", o.suite}, {"t", o.t}};
        json rows = json::array();
        for (const auto& c : all)
            rows.push_back({{"suite", c.suite}, {"metric", c.metric}, {"check", c.name}, {"residual", c.residual},
                            {"tol", c.tol}, {"expect", c.expect_small ? "<=" : ">"}, {"pass", c.pass()}});
        report["checks"] = std::move(rows);
        report["summary"] = {{"checks", all.size()}, {"failed", failed}, {"pass", failed == 0}};
        write_json(out, report);
        out << '\n';
    } else {
        char line[256];
        std::snprintf(line, sizeof line, "%-11s %-14s %-34s %-13s %-2s %-8s %s\n", "suite", "metric", "check",
                      "residual", "", "tol", "result");
        out << line;
        for (const auto& c : all) {
            std::snprintf(line, sizeof line, "%-11s %-14s %-34s %-13.6e %-2s %-8.1e %s\n", c.suite.c_str(),
                          c.metric.c_str(), c.name.c_str(), c.residual, c.expect_small ? "<=" : ">", c.tol,
                          c.pass() ? "PASS" : "FAIL");
            out << line;
        }
        out << all.size() << " checks, " << failed << " failed\n";
    }
    return failed == 0 ? kOk : kVerificationFailure;
}

// ---------------------------------------------------------------------------
// catalog

int cmd_catalog_list(std::ostream& out)
{
    json list = json::array();
    for (const auto& e : catalog()) {
        json defaults = json::object();
        for (const auto& [k, v] : e.defaults) defaults[k] = v;
        list.push_back({{"name", e.name}, {"description", e.description}, {"defaults", defaults}});
    }
    write_json(out, json{{"toolVersion", kToolVersion}, {"catalog", list}});
    out << '\n';
    return kOk;
}

int cmd_catalog_show(const Options& o, std::ostream& out)
{
    out << serialize(builtin_spec(o.metric, parse_params(o.params)));
    return kOk;
}

// ---------------------------------------------------------------------------

void add_source_options(CLI::App* sub, Options& o, bool allow_all = false)
{
    sub->add_option("metric", o.metric, allow_all ? "Catalog metric name, or 'all'" : "Catalog metric name");
    sub->add_option("--spec", o.spec, "Metric document file");
    sub->add_option("--param", o.params, "Parameter override key=value (repeatable)");
    sub->add_option("--point", o.points, "Chart point as comma-separated coordinates (repeatable)");
    sub->add_option("--orientation", o.orientation, "Override the metric orientation")
        ->check(CLI::IsMember({-1, 1}));
}

void add_twistor_options(CLI::App* sub, Options& o)
{
    sub->add_option("--t", o.t, "Fiber scale t > 0");
    sub->add_option("--samples", o.samples, "Fiber samples")->check(CLI::Range(8, 100000));
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Options o;
    CLI::App app{"Curvature of four-manifolds and their twistor spaces", "tcurv"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    auto* classify_cmd = app.add_subcommand("classify", "Einstein and (anti-)self-duality report");
    add_source_options(classify_cmd, o);
    add_twistor_options(classify_cmd, o);
    classify_cmd->add_option("--tol", o.tol, "Classification tolerance (default 1e-9)");
    classify_cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json"}));

    auto* scan_cmd = app.add_subcommand("twistor-scan", "Twistor scalar curvature over one fiber");
    add_source_options(scan_cmd, o);
    add_twistor_options(scan_cmd, o);
    scan_cmd->add_option("--tol", o.tol, "Fiber constancy tolerance (default 1e-7)");
    scan_cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));

    auto* ricci_cmd = app.add_subcommand("twistor-ricci", "Ricci tensor of the six-dimensional twistor chart");
    add_source_options(ricci_cmd, o);
    add_twistor_options(ricci_cmd, o);
    ricci_cmd->add_option("--tol", o.tol, "Ricci-parallel tolerance (default 1e-5)");
    ricci_cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json"}));

    auto* verify_cmd = app.add_subcommand("verify", "Run verification suites");
    add_source_options(verify_cmd, o, true);
    add_twistor_options(verify_cmd, o);
    verify_cmd->add_option("--suite", o.suite, "Suite to run")
        ->check(CLI::IsMember({"all", "invariants", "blocks", "identities", "twistor"}));
    verify_cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json"}));

    auto* catalog_cmd = app.add_subcommand("catalog", "Built-in metrics");
    catalog_cmd->require_subcommand(1);
    auto* list_cmd = catalog_cmd->add_subcommand("list", "List catalog metrics");
    auto* show_cmd = catalog_cmd->add_subcommand("show", "Print a catalog metric as a metric document");
    show_cmd->add_option("metric", o.metric, "Catalog metric name")->required();
    show_cmd->add_option("--param", o.params, "Parameter override key=value (repeatable)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << '\n';
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }

    try {
        std::ostringstream buffer;
        int code = kOk;
        if (*classify_cmd) code = cmd_classify(o, buffer);
        else if (*scan_cmd) code = cmd_twistor_scan(o, buffer);
        else if (*ricci_cmd) code = cmd_twistor_ricci(o, buffer);
        else if (*verify_cmd) code = cmd_verify(o, buffer);
        else if (*list_cmd) code = cmd_catalog_list(buffer);
        else if (*show_cmd) code = cmd_catalog_show(o, buffer);
        out << buffer.str();
        return code;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const SpecError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kNumericError;
    }
}

} // namespace tcurv::cli
