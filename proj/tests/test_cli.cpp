#include "tcurv/cli.hpp"

#include "json.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

using json = nlohmann::json;
using tcurv::cli::run;

namespace {

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

json invoke_json(std::vector<std::string> args)
{
    const Result r = invoke(std::move(args));
    EXPECT_EQ(r.code, 0) << r.err;
    return json::parse(r.out);
}

std::filesystem::path temp_file(const std::string& name, const std::string& content)
{
    const auto path = std::filesystem::temp_directory_path() / ("tcurv_test_" + name);
    std::ofstream(path) << content;
    return path;
}

// Subset of JSON Schema: type, required, properties, items, enum, minimum, min/maxItems, $ref, allOf, oneOf.
class SchemaValidator {
public:
    explicit SchemaValidator(json root) : root_(std::move(root)) {}

    bool validate(const json& doc, std::string& why) const { return check(root_, doc, "$", why); }

private:
    const json& resolve(const json& s) const
    {
        if (!s.contains("$ref")) return s;
        const std::string ref = s["$ref"];
        return root_.at(json::json_pointer(ref.substr(1)));
    }

    static bool type_ok(const std::string& type, const json& v)
    {
        if (type == "object") return v.is_object();
        if (type == "array") return v.is_array();
        if (type == "string") return v.is_string();
        if (type == "boolean") return v.is_boolean();
        if (type == "integer") return v.is_number_integer();
        if (type == "number") return v.is_number();
        return false;
    }

    bool check(const json& schema, const json& v, const std::string& at, std::string& why) const
    {
        const json& s = resolve(schema);
        if (s.contains("type") && !type_ok(s["type"], v)) return fail(why, at + ": expected " + s["type"].get<std::string>());
        if (s.contains("enum") && std::find(s["enum"].begin(), s["enum"].end(), v) == s["enum"].end())
            return fail(why, at + ": value not in enum");
        if (s.contains("minimum") && v.is_number() && v.get<double>() < s["minimum"].get<double>())
            return fail(why, at + ": below minimum");
        if (s.contains("required"))
            for (const auto& key : s["required"])
                if (!v.contains(key.get<std::string>())) return fail(why, at + ": missing " + key.get<std::string>());
        if (s.contains("properties") && v.is_object())
            for (const auto& [key, sub] : s["properties"].items())
                if (v.contains(key) && !check(sub, v[key], at + "." + key, why)) return false;
        if (v.is_array()) {
            if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>()) return fail(why, at + ": too short");
            if (s.contains("maxItems") && v.size() > s["maxItems"].get<std::size_t>()) return fail(why, at + ": too long");
            if (s.contains("items"))
                for (std::size_t i = 0; i < v.size(); ++i)
                    if (!check(s["items"], v[i], at + "[" + std::to_string(i) + "]", why)) return false;
        }
        if (s.contains("allOf"))
            for (const auto& sub : s["allOf"])
                if (!check(sub, v, at, why)) return false;
        if (s.contains("oneOf")) {
            int matches = 0;
            std::string ignored;
            for (const auto& sub : s["oneOf"]) matches += check(sub, v, at, ignored) ? 1 : 0;
            if (matches != 1) return fail(why, at + ": " + std::to_string(matches) + " oneOf branches match");
        }
        return true;
    }

    static bool fail(std::string& why, std::string msg)
    {
        why = std::move(msg);
        return false;
    }

    json root_;
};

const SchemaValidator& schema()
{
    static const SchemaValidator v = [] {
        std::ifstream in(std::string(TCURV_SOURCE_DIR) + "/docs/report.schema.json");
        return SchemaValidator(json::parse(in));
    }();
    return v;
}

void walk_numbers(const json& v, const std::string& key, const std::function<void(const std::string&, double)>& f)
{
    if (v.is_object())
        for (const auto& [k, sub] : v.items()) walk_numbers(sub, k, f);
    else if (v.is_array())
        for (const auto& sub : v) walk_numbers(sub, key, f);
    else if (v.is_number())
        f(key, v.get<double>());
}

} // namespace

TEST(Cli, ClassifyFourSphere)
{
    const json r = invoke_json({"classify", "s4"});
    EXPECT_EQ(r["command"], "classify");
    EXPECT_EQ(r["metric"]["name"], "s4");
    EXPECT_EQ(r["points"].size(), 5u);
    EXPECT_TRUE(r["summary"]["einstein"]);
    EXPECT_TRUE(r["summary"]["selfDual"]);
    EXPECT_TRUE(r["summary"]["antiSelfDual"]);
    EXPECT_TRUE(r["summary"]["fiberConstant"]);
    for (const auto& p : r["points"]) EXPECT_NEAR(p["scalar"].get<double>(), 12.0, 1e-9);
}

TEST(Cli, ClassifyProductOfSpheres)
{
    const json r = invoke_json({"classify", "s2xs2", "--point", "1.0,0.5,1.2,0.3"});
    ASSERT_EQ(r["points"].size(), 1u);
    EXPECT_TRUE(r["summary"]["einstein"]);
    EXPECT_FALSE(r["summary"]["selfDual"]);
    EXPECT_FALSE(r["summary"]["fiberConstant"]);
    const json& p = r["points"][0];
    EXPECT_NEAR(p["scalar"].get<double>(), 4.0, 1e-9);
    EXPECT_NEAR(p["twistor"]["fiberMin"].get<double>(), 5.0, 1e-6);
    EXPECT_NEAR(p["twistor"]["fiberMax"].get<double>(), 6.0, 1e-6);
}

TEST(Cli, OrientationFlagSwapsHalves)
{
    const json plus = invoke_json({"classify", "cp2"});
    const json minus = invoke_json({"classify", "cp2", "--orientation", "-1"});
    EXPECT_TRUE(plus["summary"]["selfDual"]);
    EXPECT_FALSE(minus["summary"]["selfDual"]);
    EXPECT_TRUE(minus["summary"]["antiSelfDual"]);
    EXPECT_EQ(minus["conventions"]["orientation"], -1);
}

TEST(Cli, InputErrorsExitWithTwo)
{
    EXPECT_EQ(invoke({"classify", "nope"}).code, 2);
    EXPECT_EQ(invoke({"classify", "s4", "--param", "q=1"}).code, 2);
    EXPECT_EQ(invoke({"classify", "s4", "--param", "r"}).code, 2);
    EXPECT_EQ(invoke({"classify", "s4", "--point", "1,2"}).code, 2);
    EXPECT_EQ(invoke({"classify", "s4", "--point", "1,2,x,4"}).code, 2);
    EXPECT_EQ(invoke({"classify", "--spec", "/nonexistent/metric.txt"}).code, 2);
    EXPECT_EQ(invoke({"classify"}).code, 2);
    EXPECT_EQ(invoke({"frobnicate"}).code, 2);
    EXPECT_EQ(invoke({"twistor-scan", "s4", "--samples", "3"}).code, 2);
    EXPECT_EQ(invoke({"verify", "s4", "--suite", "bogus"}).code, 2);

    const auto bad = temp_file("bad.metric", "[metric]\nname = t\ndim = 2\ncoords = [x, y]\ng = [[1, x +], [x +, 1]]\n");
    const Result r = invoke({"classify", "--spec", bad.string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("g[1][2]"), std::string::npos) << r.err;
    EXPECT_TRUE(r.out.empty());
}

TEST(Cli, NumericErrorsExitWithThree)
{
    EXPECT_EQ(invoke({"twistor-scan", "s4", "--t", "0"}).code, 3);
    EXPECT_EQ(invoke({"classify", "s4", "--t", "-1"}).code, 3);
    const auto indefinite = temp_file("indef.metric", "[metric]\nname = t\ndim = 4\ncoords = [a, b, c, d]\n"
                                                      "g = [[1,0,0,0],[0,-1,0,0],[0,0,1,0],[0,0,0,1]]\n");
    EXPECT_EQ(invoke({"classify", "--spec", indefinite.string(), "--point", "0,0,0,0"}).code, 3);
}

TEST(Cli, TwistorScanFlatCsv)
{
    const Result r = invoke({"twistor-scan", "flat4", "--t", "1", "--format", "csv", "--samples", "16"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    EXPECT_EQ(line, "nx,ny,nz,scalar");
    int rows = 0;
    while (std::getline(lines, line) && line[0] != '#') {
        EXPECT_EQ(line.substr(line.rfind(',') + 1), "2");
        ++rows;
    }
    EXPECT_EQ(rows, 16);
    EXPECT_NE(line.find("fiberConstant=true"), std::string::npos) << line;
}

TEST(Cli, TwistorScanProductAndSphere)
{
    const json pr = invoke_json({"twistor-scan", "s2xs2", "--t", "1", "--format", "json"});
    EXPECT_NEAR(pr["summary"]["min"].get<double>(), 5.0, 1e-6);
    EXPECT_NEAR(pr["summary"]["max"].get<double>(), 6.0, 1e-6);
    EXPECT_FALSE(pr["summary"]["fiberConstant"]);
    const json s4 = invoke_json({"twistor-scan", "s4", "--t", "1", "--format", "json"});
    EXPECT_LT(s4["summary"]["spread"].get<double>(), 1e-9);
    EXPECT_TRUE(s4["summary"]["fiberConstant"]);
}

TEST(Cli, CsvAndJsonCarryTheSameFields)
{
    const json j = invoke_json({"twistor-scan", "s2xs2", "--format", "json", "--samples", "8"});
    const Result c = invoke({"twistor-scan", "s2xs2", "--format", "csv", "--samples", "8"});
    ASSERT_EQ(c.code, 0);
    std::istringstream lines(c.out);
    std::string header;
    std::getline(lines, header);
    std::string joined;
    for (const auto& [k, v] : j["rows"][0].items()) joined += (joined.empty() ? "" : ",") + k;
    EXPECT_EQ(header, joined);
    std::string line, summary;
    std::vector<std::string> rows;
    while (std::getline(lines, line)) (line[0] == '#' ? summary : rows.emplace_back()) = line;
    ASSERT_EQ(rows.size(), j["rows"].size());
    EXPECT_DOUBLE_EQ(std::stod(rows[3].substr(rows[3].rfind(',') + 1)), j["rows"][3]["scalar"].get<double>());
    for (const auto& [k, v] : j["summary"].items()) EXPECT_NE(summary.find(k + "="), std::string::npos) << k;
}

TEST(Cli, TwistorRicciVerdicts)
{
    const json flat = invoke_json({"twistor-ricci", "flat4", "--point", "0.1,0.2,0.3,0.4"});
    EXPECT_TRUE(flat["summary"]["ricciParallel"]);
    EXPECT_FALSE(flat["summary"]["einstein"]);
    const json sch = invoke_json({"twistor-ricci", "schwarzschild", "--point", "3,1.2,0.5,0.1,0.5,0.4"});
    EXPECT_GT(sch["summary"]["ricciParallelResidual"].get<double>(), 1e-3);
    EXPECT_FALSE(sch["summary"]["ricciParallel"]);
    EXPECT_FALSE(sch["summary"]["integrable"]);
}

TEST(Cli, VerifyIdentitiesPasses)
{
    const Result r = invoke({"verify", "all", "--suite", "identities"});
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find(", 0 failed"), std::string::npos);
}

TEST(Cli, VerifySchwarzschildTwistorReportsExpectedNegatives)
{
    const Result r = invoke({"verify", "schwarzschild", "--suite", "twistor"});
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("integrable=false"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("ricci-parallel=false"), std::string::npos) << r.out;
}

TEST(Cli, VerifyFlatIsFast)
{
    const auto start = std::chrono::steady_clock::now();
    const Result r = invoke({"verify", "flat4"});
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT_EQ(r.code, 0);
    EXPECT_LT(seconds, 1.0);
}

TEST(Cli, VerifyJsonCountsMatch)
{
    const json r = invoke_json({"verify", "s4", "--format", "json"});
    int failed = 0;
    for (const auto& c : r["checks"]) failed += c["pass"].get<bool>() ? 0 : 1;
    EXPECT_EQ(r["summary"]["checks"].get<std::size_t>(), r["checks"].size());
    EXPECT_EQ(r["summary"]["failed"], failed);
    EXPECT_TRUE(r["summary"]["pass"]);
}

TEST(Cli, OutputIsDeterministic)
{
    for (const std::vector<std::string> args : {std::vector<std::string>{"classify", "schwarzschild"},
                                                {"twistor-scan", "s2xs2", "--format", "csv"},
                                                {"verify", "cp2", "--suite", "blocks"}}) {
        const Result a = invoke(args), b = invoke(args);
        EXPECT_EQ(a.out, b.out);
        EXPECT_FALSE(a.out.empty());
    }
}

TEST(Cli, ReportsMatchSchema)
{
    const std::vector<std::vector<std::string>> commands{
        {"classify", "s2xs2"},
        {"classify", "eguchi_hanson", "--orientation", "-1"},
        {"twistor-scan", "cp2", "--format", "json"},
        {"twistor-ricci", "s4", "--point", "0.1,0.2,0.3,0.4"},
        {"verify", "h4", "--format", "json"},
        {"catalog", "list"},
    };
    for (const auto& args : commands) {
        const json doc = invoke_json(args);
        std::string why;
        EXPECT_TRUE(schema().validate(doc, why)) << args[0] << ": " << why;
    }
    json broken = invoke_json({"classify", "s4"});
    broken["points"][0].erase("blocks");
    std::string why;
    EXPECT_FALSE(schema().validate(broken, why));
}

TEST(Cli, NumbersAreFiniteAndResidualsNonNegative)
{
    for (const char* name : {"s4", "cp2", "schwarzschild", "eguchi_hanson", "h4"}) {
        const json r = invoke_json({"classify", name});
        walk_numbers(r, "", [&](const std::string& key, double v) {
            EXPECT_TRUE(std::isfinite(v)) << name << " " << key;
            if (key.find("Residual") != std::string::npos && key != "bochnerResidual") EXPECT_GE(v, 0.0) << key;
        });
    }
}

TEST(Cli, CatalogListAndShowRoundTrip)
{
    const json list = invoke_json({"catalog", "list"});
    ASSERT_EQ(list["catalog"].size(), 7u);
    const Result shown = invoke({"catalog", "show", "s2xs2", "--param", "r2=2"});
    ASSERT_EQ(shown.code, 0) << shown.err;
    const auto path = temp_file("s2xs2.metric", shown.out);
    const json a = invoke_json({"classify", "s2xs2", "--param", "r2=2"});
    const json b = invoke_json({"classify", "--spec", path.string()});
    EXPECT_EQ(a["points"], b["points"]);
    EXPECT_EQ(b["metric"]["source"], "file");
    const json c = invoke_json({"classify", "--spec", path.string(), "--param", "r2=1"});
    EXPECT_TRUE(c["summary"]["einstein"]);
    EXPECT_FALSE(b["summary"]["einstein"]);
}

TEST(Cli, VersionAndHelp)
{
    const Result v = invoke({"--version"});
    EXPECT_EQ(v.code, 0);
    EXPECT_NE(v.out.find(tcurv::cli::kToolVersion), std::string::npos);
    const Result h = invoke({"--help"});
    EXPECT_EQ(h.code, 0);
    EXPECT_NE(h.out.find("twistor-scan"), std::string::npos);
}
