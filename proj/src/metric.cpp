#include "tcurv/metric.hpp"

#include "tcurv/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>

namespace tcurv {

MetricField::MetricField(std::string name, std::vector<std::string> coordinate_names, int orientation,
                         Evaluator evaluator, int derivative_loss)
    : name_(std::move(name)), coordinate_names_(std::move(coordinate_names)), orientation_(orientation),
      evaluator_(std::move(evaluator)), derivative_loss_(derivative_loss)
{
    if (orientation_ != 1 && orientation_ != -1) throw SpecError("orientation must be +1 or -1");
    if (coordinate_names_.empty() || dim() > kMaxJetDim)
        throw DimensionError("unsupported chart dimension " + std::to_string(dim()));
}

MetricField& MetricField::set_parameters(Parameters p)
{
    parameters_ = std::move(p);
    return *this;
}

MetricField& MetricField::set_suggested_points(std::vector<ChartPoint> pts)
{
    for (const auto& p : pts)
        if (p.dim() != dim()) throw DimensionError("suggested point has the wrong dimension");
    suggested_points_ = std::move(pts);
    return *this;
}

MetricField& MetricField::add_warning(std::string w)
{
    warnings_.push_back(std::move(w));
    return *this;
}

MetricField MetricField::with_orientation(int orientation) const
{
    MetricField f = *this;
    if (orientation != 1 && orientation != -1) throw SpecError("orientation must be +1 or -1");
    f.orientation_ = orientation;
    return f;
}

Eigen::MatrixXd MetricField::values(const ChartPoint& p) const
{
    if (p.dim() != dim()) throw DimensionError("point dimension does not match the chart");
    const JetLayout& layout = jet_layout(dim(), derivative_loss_);
    std::vector<Jet> x;
    for (int i = 0; i < dim(); ++i) x.push_back(Jet::variable(layout, i, p.coords[i]));
    return tcurv::values(evaluate(x));
}

namespace {

std::string format_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(std::string_view s)
{
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

[[noreturn]] void fail_at(int line, const std::string& what)
{
    throw SpecError("line " + std::to_string(line) + ": " + what);
}

bool is_identifier(std::string_view s)
{
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    return std::all_of(s.begin(), s.end(),
                       [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

double parse_number(std::string_view text, int line)
{
    std::string s = trim(text);
    std::string_view v = s;
    if (!v.empty() && v[0] == '+') v.remove_prefix(1);
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out))
        fail_at(line, "expected a number, got '" + s + "'");
    return out;
}

// Splits the inside of a bracketed list at top-level commas.
std::vector<std::string> split_list(std::string_view text, int line)
{
    std::string s = trim(text);
    if (s.size() < 2 || s.front() != '[' || s.back() != ']') fail_at(line, "expected a bracketed list");
    std::string_view inner = std::string_view(s).substr(1, s.size() - 2);
    std::vector<std::string> items;
    if (trim(inner).empty()) return items;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < inner.size(); ++i) {
        const char c = inner[i];
        if (c == '(' || c == '[') ++depth;
        else if (c == ')' || c == ']') --depth;
        else if (c == ',' && depth == 0) {
            items.push_back(trim(inner.substr(start, i - start)));
            start = i + 1;
        }
        if (depth < 0) fail_at(line, "unbalanced brackets");
    }
    items.push_back(trim(inner.substr(start)));
    for (const auto& item : items)
        if (item.empty()) fail_at(line, "empty list element");
    return items;
}

struct Statement {
    int line;
    std::string section;
    std::string key;
    std::string value;
};

std::vector<Statement> split_statements(std::string_view document)
{
    std::vector<Statement> out;
    std::string section;
    std::string pending;
    int pending_line = 0;
    int depth = 0;
    int line_no = 0;
    std::istringstream in{std::string(document)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::string line = trim(raw);
        if (line.empty()) continue;
        if (depth == 0 && line.front() == '[' && line.back() == ']' && line.find('=') == std::string::npos) {
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            if (section != "metric" && section != "params") fail_at(line_no, "unknown section [" + section + "]");
            continue;
        }
        if (depth == 0) {
            pending_line = line_no;
            pending.clear();
        } else {
            pending += ' ';
        }
        pending += line;
        for (char c : line) {
            if (c == '[' || c == '(') ++depth;
            else if (c == ']' || c == ')') --depth;
            if (depth < 0) fail_at(line_no, "unbalanced brackets");
        }
        if (depth > 0) continue;

        const auto eq = pending.find('=');
        if (eq == std::string::npos) fail_at(pending_line, "expected 'key = value'");
        if (section.empty()) fail_at(pending_line, "statement outside a section");
        Statement st{pending_line, section, trim(std::string_view(pending).substr(0, eq)),
                     trim(std::string_view(pending).substr(eq + 1))};
        if (!is_identifier(st.key)) fail_at(pending_line, "invalid key '" + st.key + "'");
        if (st.value.empty()) fail_at(pending_line, "missing value for '" + st.key + "'");
        out.push_back(std::move(st));
    }
    if (depth > 0) fail_at(pending_line, "unterminated bracket");
    return out;
}

std::vector<ChartPoint> random_probe_points(const MetricSpec& spec, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> jitter(-0.1, 0.1);
    std::uniform_real_distribution<double> box(0.1, 1.1);
    std::vector<ChartPoint> pts;
    for (int k = 0; k < 200; ++k) {
        Eigen::VectorXd x(spec.dim);
        if (!spec.suggested_points.empty()) {
            x = spec.suggested_points[k % spec.suggested_points.size()].coords;
            for (int i = 0; i < spec.dim; ++i) x[i] += jitter(rng);
        } else {
            for (int i = 0; i < spec.dim; ++i) x[i] = box(rng);
        }
        pts.emplace_back(std::move(x));
    }
    return pts;
}

// Accepts textually different (i,j)/(j,i) components that agree numerically.
void symmetrize(MetricSpec& spec)
{
    std::vector<double> params;
    for (const auto& [k, v] : spec.parameters) params.push_back(v);
    std::mt19937_64 rng(0x5eed);
    for (int i = 0; i < spec.dim; ++i) {
        for (int j = i + 1; j < spec.dim; ++j) {
            const ExprPtr& a = spec.components[i][j];
            const ExprPtr& b = spec.components[j][i];
            if (structurally_equal(*a, *b)) continue;
            int agreed = 0;
            for (const auto& p : random_probe_points(spec, rng)) {
                std::span<const double> x(p.coords.data(), p.coords.size());
                double va, vb;
                try {
                    va = evaluate<double>(*a, x, params);
                    vb = evaluate<double>(*b, x, params);
                } catch (const DomainError&) {
                    continue;
                }
                if (std::abs(va - vb) > 1e-12 * (1.0 + std::max(std::abs(va), std::abs(vb))))
                    throw SpecError("asymmetric components g[" + std::to_string(i + 1) + "][" +
                                    std::to_string(j + 1) + "] and g[" + std::to_string(j + 1) + "][" +
                                    std::to_string(i + 1) + "]");
                if (++agreed == 10) break;
            }
            if (agreed < 10)
                throw SpecError("cannot confirm symmetry of g[" + std::to_string(i + 1) + "][" +
                                std::to_string(j + 1) + "]: too few admissible probe points");
            spec.components[j][i] = a;
            spec.warnings.push_back("g[" + std::to_string(j + 1) + "][" + std::to_string(i + 1) +
                                    "] differs textually from g[" + std::to_string(i + 1) + "][" +
                                    std::to_string(j + 1) + "]; symmetrized");
        }
    }
}

} // namespace

MetricSpec parse_metric_spec(std::string_view document)
{
    MetricSpec spec;
    std::set<std::string> seen;
    int g_line = 0;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::vector<double>> points;
    int points_line = 0;
    bool have_dim = false;

    for (const auto& st : split_statements(document)) {
        const std::string tag = st.section + "." + st.key;
        if (!seen.insert(tag).second) fail_at(st.line, "duplicate key '" + st.key + "'");
        if (st.section == "params") {
            spec.parameters.emplace_back(st.key, parse_number(st.value, st.line));
            continue;
        }
        if (st.key == "name") {
            std::string v = st.value;
            if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
            if (v.empty()) fail_at(st.line, "empty name");
            spec.name = v;
        } else if (st.key == "dim") {
            const double d = parse_number(st.value, st.line);
            if (d != 2 && d != 3 && d != 4 && d != 6) fail_at(st.line, "dim must be 2, 3, 4 or 6");
            spec.dim = static_cast<int>(d);
            have_dim = true;
        } else if (st.key == "coords") {
            spec.coordinate_names = split_list(st.value, st.line);
            for (const auto& c : spec.coordinate_names)
                if (!is_identifier(c)) fail_at(st.line, "invalid coordinate name '" + c + "'");
        } else if (st.key == "orientation") {
            const double o = parse_number(st.value, st.line);
            if (o != 1 && o != -1) fail_at(st.line, "orientation must be +1 or -1");
            spec.orientation = static_cast<int>(o);
        } else if (st.key == "g") {
            g_line = st.line;
            for (const auto& row : split_list(st.value, st.line)) rows.push_back(split_list(row, st.line));
        } else if (st.key == "points") {
            points_line = st.line;
            for (const auto& row : split_list(st.value, st.line)) {
                std::vector<double> p;
                for (const auto& x : split_list(row, st.line)) p.push_back(parse_number(x, st.line));
                points.push_back(std::move(p));
            }
        } else {
            fail_at(st.line, "unknown key '" + st.key + "' in [metric]");
        }
    }

    if (spec.name.empty()) throw SpecError("missing field 'name'");
    if (!have_dim) throw SpecError("missing field 'dim'");
    if (spec.coordinate_names.empty()) throw SpecError("missing field 'coords'");
    if (rows.empty()) throw SpecError("missing field 'g'");
    if (static_cast<int>(spec.coordinate_names.size()) != spec.dim)
        throw SpecError("coords lists " + std::to_string(spec.coordinate_names.size()) +
                        " names but dim is " + std::to_string(spec.dim));
    std::set<std::string> names;
    for (const auto& c : spec.coordinate_names)
        if (!names.insert(c).second) throw SpecError("name '" + c + "' declared twice");
    for (const auto& [k, v] : spec.parameters)
        if (!names.insert(k).second) throw SpecError("name '" + k + "' declared twice");

    const std::size_t n = static_cast<std::size_t>(spec.dim);
    const bool square =
        rows.size() == n && std::all_of(rows.begin(), rows.end(), [n](const auto& r) { return r.size() == n; });
    if (!square) {
        std::size_t cols = rows.front().size();
        for (const auto& r : rows)
            if (r.size() != cols) fail_at(g_line, "component array has ragged rows");
        fail_at(g_line, "component array is " + std::to_string(rows.size()) + "x" + std::to_string(cols) +
                            ", expected " + std::to_string(n) + "x" + std::to_string(n));
    }

    SymbolTable symbols;
    symbols.coordinates = spec.coordinate_names;
    for (const auto& [k, v] : spec.parameters) symbols.parameters.push_back(k);
    spec.component_text = rows;
    spec.components.assign(n, std::vector<ExprPtr>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            try {
                spec.components[i][j] = parse_expression(rows[i][j], symbols);
            } catch (const ParseError& e) {
                fail_at(g_line, "g[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) + "]: " + e.what());
            }
        }
    }

    for (auto& p : points) {
        if (p.size() != n) fail_at(points_line, "point has " + std::to_string(p.size()) + " coordinates");
        spec.suggested_points.emplace_back(Eigen::Map<Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(n)));
    }

    symmetrize(spec);
    return spec;
}

std::string serialize(const MetricSpec& spec)
{
    std::string out = "[metric]\n";
    out += "name = " + spec.name + "\n";
    out += "dim = " + std::to_string(spec.dim) + "\n";
    out += "coords = [";
    for (std::size_t i = 0; i < spec.coordinate_names.size(); ++i)
        out += (i ? ", " : "") + spec.coordinate_names[i];
    out += "]\n";
    out += spec.orientation > 0 ? "orientation = +1\n" : "orientation = -1\n";
    out += "g = [\n";
    for (std::size_t i = 0; i < spec.components.size(); ++i) {
        out += "  [";
        for (std::size_t j = 0; j < spec.components[i].size(); ++j)
            out += (j ? ", " : "") + to_string(*spec.components[i][j]);
        out += i + 1 < spec.components.size() ? "],\n" : "]\n";
    }
    out += "]\n";
    if (!spec.suggested_points.empty()) {
        out += "points = [\n";
        for (std::size_t k = 0; k < spec.suggested_points.size(); ++k) {
            const auto& c = spec.suggested_points[k].coords;
            out += "  [";
            for (Eigen::Index i = 0; i < c.size(); ++i) out += (i ? ", " : "") + format_number(c[i]);
            out += k + 1 < spec.suggested_points.size() ? "],\n" : "]\n";
        }
        out += "]\n";
    }
    if (!spec.parameters.empty()) {
        out += "\n[params]\n";
        for (const auto& [k, v] : spec.parameters) out += k + " = " + format_number(v) + "\n";
    }
    return out;
}

MetricField make_metric_field(const MetricSpec& spec)
{
    auto components = spec.components;
    std::vector<double> params;
    for (const auto& [k, v] : spec.parameters) params.push_back(v);
    const int n = spec.dim;

    auto evaluator = [components, params, n](std::span<const Jet> x) {
        if (static_cast<int>(x.size()) != n) throw DimensionError("wrong number of coordinates");
        JetMatrix g(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = i; j < n; ++j) {
                g(i, j) = evaluate<Jet>(*components[i][j], x, params);
                if (j != i) g(j, i) = g(i, j);
            }
        }
        return g;
    };

    MetricField field(spec.name, spec.coordinate_names, spec.orientation, evaluator);
    field.set_parameters(spec.parameters);
    field.set_suggested_points(spec.suggested_points);
    field.set_expressions(spec.components);
    for (const auto& w : spec.warnings) field.add_warning(w);
    return field;
}

MetricField load_metric_spec(std::string_view document)
{
    return make_metric_field(parse_metric_spec(document));
}

} // namespace tcurv
