#include "tcurv/errors.hpp"
#include "tcurv/metric.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>

namespace tcurv {

namespace {

using Rows = std::vector<std::vector<std::string>>;
using Points = std::vector<std::vector<double>>;

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string document(const std::string& name, const std::vector<std::string>& coords, int orientation,
                     const Rows& g, const Points& points, const Parameters& params)
{
    std::string out = "[metric]\nname = " + name + "\ndim = " + std::to_string(coords.size()) + "\ncoords = [";
    for (std::size_t i = 0; i < coords.size(); ++i) out += (i ? ", " : "") + coords[i];
    out += "]\norientation = ";
    out += orientation > 0 ? "+1\n" : "-1\n";
    out += "g = [\n";
    for (const auto& row : g) {
        out += "  [";
        for (std::size_t j = 0; j < row.size(); ++j) out += (j ? ", " : "") + row[j];
        out += "],\n";
    }
    out.erase(out.size() - 2, 1);
    out += "]\npoints = [\n";
    for (const auto& p : points) {
        out += "  [";
        for (std::size_t j = 0; j < p.size(); ++j) out += (j ? ", " : "") + num(p[j]);
        out += "],\n";
    }
    out.erase(out.size() - 2, 1);
    out += "]\n";
    if (!params.empty()) {
        out += "\n[params]\n";
        for (const auto& [k, v] : params) out += k + " = " + num(v) + "\n";
    }
    return out;
}

Rows diagonal(const std::vector<std::string>& d)
{
    Rows g(d.size(), std::vector<std::string>(d.size(), "0"));
    for (std::size_t i = 0; i < d.size(); ++i) g[i][i] = d[i];
    return g;
}

double param(const Parameters& p, const std::string& key)
{
    for (const auto& [k, v] : p)
        if (k == key) return v;
    throw SpecError("missing parameter '" + key + "'");
}

void require_positive(const Parameters& p, const std::string& key)
{
    if (!(param(p, key) > 0.0)) throw SpecError("parameter '" + key + "' must be positive");
}

const std::vector<std::string> kCartesian{"x1", "x2", "x3", "x4"};

std::string flat4(const Parameters& p)
{
    return document("flat4", kCartesian, 1, diagonal({"1", "1", "1", "1"}),
                    {{0, 0, 0, 0}, {0.3, -0.2, 0.1, 0.4}, {1, 2, -1, 0.5}, {-0.7, 0.2, 0.9, -1.3}, {2, 2, 2, 2}}, p);
}

std::string s4(const Parameters& p)
{
    require_positive(p, "r");
    const double r = param(p, "r");
    const std::string f = "4*r^4/(r^2 + x1^2 + x2^2 + x3^2 + x4^2)^2";
    Points pts{{0, 0, 0, 0}, {0.3, -0.2, 0.1, 0.4}, {0.7, 0.1, -0.5, 0.2}, {-0.4, 0.6, 0.3, -0.2}, {1.1, -0.3, 0.2, 0.5}};
    for (auto& x : pts)
        for (auto& c : x) c *= r;
    return document("s4", kCartesian, 1, diagonal({f, f, f, f}), pts, p);
}

// Fubini-Study on the affine chart C^2 with z1 = x1 + i x2, z2 = x3 + i x4:
// g = |dz|^2/rho - |<z,dz>|^2/rho^2, rho = 1 + |z|^2.
std::string cp2(const Parameters& p)
{
    const std::string rho = "(1 + x1^2 + x2^2 + x3^2 + x4^2)";
    // P = x, Q = J x with J the complex structure.
    const std::vector<std::pair<int, std::string>> Q{{-1, "x2"}, {1, "x1"}, {-1, "x4"}, {1, "x3"}};
    Rows g(4, std::vector<std::string>(4));
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            const std::string P = kCartesian[a] + "*" + kCartesian[b];
            const std::string QQ = Q[a].second + "*" + Q[b].second;
            const std::string sum = Q[a].first * Q[b].first > 0 ? P + " + " + QQ : P + " - " + QQ;
            g[a][b] = (a == b ? "1/" + rho + " - " : "-") + "(" + sum + ")/" + rho + "^2";
        }
    }
    return document("cp2", kCartesian, 1, g,
                    {{0, 0, 0, 0}, {0.3, -0.2, 0.1, 0.4}, {0.7, 0.1, -0.5, 0.2}, {-0.4, 0.6, 0.3, -0.2},
                     {1.1, -0.3, 0.2, 0.5}},
                    p);
}

std::string s2xs2(const Parameters& p)
{
    require_positive(p, "r1");
    require_positive(p, "r2");
    return document("s2xs2", {"th1", "ph1", "th2", "ph2"}, 1,
                    diagonal({"r1^2", "r1^2*sin(th1)^2", "r2^2", "r2^2*sin(th2)^2"}),
                    {{1.0, 0.3, 2.0, 1.1}, {0.5, -0.4, 1.2, 0.0}, {2.5, 1.0, 0.7, -2.0}, {1.3, 2.2, 1.9, 0.4},
                     {0.8, 0.0, 1.5707963267948966, 3.0}},
                    p);
}

std::string h4(const Parameters& p)
{
    const std::string f = "1/y^2";
    return document("h4", {"x1", "x2", "x3", "y"}, 1, diagonal({f, f, f, f}),
                    {{0, 0, 0, 1}, {0.3, -0.2, 0.1, 0.5}, {1, 2, -1, 2}, {-0.7, 0.2, 0.9, 0.8}, {0.1, 0.1, 0.1, 3}}, p);
}

std::string schwarzschild(const Parameters& p)
{
    require_positive(p, "m");
    const double m = param(p, "m");
    const std::string f = "(1 - 2*m/r)";
    return document("schwarzschild", {"r", "th", "ph", "tau"}, 1,
                    diagonal({"1/" + f, "r^2", "r^2*sin(th)^2", f}),
                    {{3 * m, 1.0, 0.3, 0.0}, {2.5 * m, 0.7, 1.0, 0.5}, {4 * m, 2.0, -0.5, 1.0},
                     {5 * m, 1.3, 2.0, -1.0}, {6 * m, 0.4, 0.0, 2.0}},
                    p);
}

// Gibbons-Hawking form with left-invariant forms on SU(2):
// g = dr^2/f + r^2/4 (s1^2 + s2^2 + f s3^2), f = 1 - a^4/r^4, s3 = dpsi + cos(th) dphi.
std::string eguchi_hanson(const Parameters& p)
{
    require_positive(p, "a");
    const double a = param(p, "a");
    const std::string f = "(1 - a^4/r^4)";
    Rows g = diagonal({"1/" + f, "r^2/4", "r^2/4*(sin(th)^2 + " + f + "*cos(th)^2)", "r^2/4*" + f});
    g[2][3] = g[3][2] = "r^2/4*" + f + "*cos(th)";
    return document("eguchi_hanson", {"r", "th", "ph", "psi"}, 1, g,
                    {{1.5 * a, 1.0, 0.3, 0.2}, {2 * a, 0.7, 1.0, -0.4}, {1.2 * a, 2.0, -0.5, 1.0},
                     {3 * a, 1.3, 2.0, 0.0}, {2.5 * a, 0.4, 0.0, 2.0}},
                    p);
}

struct Builder {
    CatalogEntry entry;
    std::function<std::string(const Parameters&)> make;
};

const std::vector<Builder>& builders()
{
    static const std::vector<Builder> table{
        {{"flat4", "Euclidean R^4", {}}, flat4},
        {{"s4", "round 4-sphere of radius r, stereographic chart", {{"r", 1.0}}}, s4},
        {{"cp2", "Fubini-Study CP^2, holomorphic sectional curvature 4, complex orientation", {}}, cp2},
        {{"s2xs2", "product of round 2-spheres of radii r1, r2", {{"r1", 1.0}, {"r2", 1.0}}}, s2xs2},
        {{"h4", "hyperbolic 4-space, upper half-space model", {}}, h4},
        {{"schwarzschild", "Riemannian Schwarzschild of mass m", {{"m", 1.0}}}, schwarzschild},
        {{"eguchi_hanson", "Eguchi-Hanson with parameter a, oriented so that W- = 0", {{"a", 1.0}}}, eguchi_hanson},
    };
    return table;
}

} // namespace

const std::vector<CatalogEntry>& catalog()
{
    static const std::vector<CatalogEntry> entries = [] {
        std::vector<CatalogEntry> out;
        for (const auto& b : builders()) out.push_back(b.entry);
        return out;
    }();
    return entries;
}

MetricSpec builtin_spec(std::string_view name, const std::map<std::string, double>& overrides)
{
    for (const auto& b : builders()) {
        if (b.entry.name != name) continue;
        Parameters params = b.entry.defaults;
        for (const auto& [k, v] : overrides) {
            auto it = std::find_if(params.begin(), params.end(), [&](const auto& kv) { return kv.first == k; });
            if (it == params.end()) throw SpecError("unknown parameter '" + k + "' for " + std::string(name));
            it->second = v;
        }
        return parse_metric_spec(b.make(params));
    }
    throw SpecError("unknown catalog metric '" + std::string(name) + "'");
}

MetricField builtin(std::string_view name, const std::map<std::string, double>& overrides)
{
    return make_metric_field(builtin_spec(name, overrides));
}

} // namespace tcurv
