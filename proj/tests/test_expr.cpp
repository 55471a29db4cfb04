#include "tcurv/errors.hpp"
#include "tcurv/expr.hpp"
#include "tcurv/metric.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <string>

using namespace tcurv;

namespace {

const SymbolTable kXY{{"x", "y"}, {"a"}};

double eval(const std::string& text, double x = 0.0, double y = 0.0, double a = 2.0)
{
    const ExprPtr e = parse_expression(text, kXY);
    const std::vector<double> coords{x, y};
    const std::vector<double> params{a};
    return evaluate<double>(*e, coords, params);
}

std::size_t error_offset(const std::string& text, const SymbolTable& symbols)
{
    try {
        parse_expression(text, symbols);
    } catch (const ParseError& e) {
        return e.offset();
    }
    ADD_FAILURE() << "no parse error for '" << text << "'";
    return 0;
}

} // namespace

TEST(Expr, PowerOfFunctionCall)
{
    const ExprPtr e = parse_expression("sin(theta)^2", SymbolTable{{"theta"}, {}});
    ASSERT_EQ(e->kind, Expr::Kind::Pow);
    ASSERT_EQ(e->lhs->kind, Expr::Kind::Call);
    EXPECT_EQ(e->lhs->function, Function::Sin);
    EXPECT_EQ(e->lhs->lhs->kind, Expr::Kind::Coordinate);
    EXPECT_EQ(e->rhs->kind, Expr::Kind::Constant);
    EXPECT_EQ(e->rhs->value, 2.0);
}

TEST(Expr, UnclosedCallReportsOffset)
{
    EXPECT_EQ(error_offset("sin(", SymbolTable{{"theta"}, {}}), 4u);
    EXPECT_EQ(error_offset("x + * y", kXY), 4u);
    EXPECT_EQ(error_offset("x + q", kXY), 4u);
    EXPECT_EQ(error_offset("(x", kXY), 2u);
    EXPECT_EQ(error_offset("x y", kXY), 2u);
}

TEST(Expr, ErrorMessageCarriesOffset)
{
    try {
        parse_expression("sin(", SymbolTable{{"theta"}, {}});
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("offset 4"), std::string::npos);
    }
}

TEST(Expr, JetEvaluationOfSquaredSine)
{
    const ExprPtr e = parse_expression("sin(x)^2", SymbolTable{{"x"}, {}});
    const double x0 = std::numbers::pi / 4;
    const std::vector<Jet> coords{Jet::variable(jet_layout(1, 1), 0, x0)};
    const Jet v = evaluate<Jet>(*e, coords, {});
    EXPECT_NEAR(v.value(), 0.5, 1e-15);

    auto plain = [&e](double x) {
        const std::vector<double> c{x};
        return evaluate<double>(*e, c, {});
    };
    const double h = 1e-5;
    const double fd = (plain(x0 + h) - plain(x0 - h)) / (2 * h);
    EXPECT_NEAR(v.partial({0}), fd, 1e-9);
    EXPECT_NEAR(v.partial({0}), 1.0, 1e-14);
}

TEST(Expr, PrecedenceAndAssociativity)
{
    EXPECT_DOUBLE_EQ(eval("1 + 2 * 3"), 7.0);
    EXPECT_DOUBLE_EQ(eval("(1 + 2) * 3"), 9.0);
    EXPECT_DOUBLE_EQ(eval("2^3^2"), 512.0);
    EXPECT_DOUBLE_EQ(eval("-x^2", 3.0), -9.0);
    EXPECT_DOUBLE_EQ(eval("2^-1"), 0.5);
    EXPECT_DOUBLE_EQ(eval("8 / 4 / 2"), 1.0);
    EXPECT_DOUBLE_EQ(eval("5 - 3 - 1"), 1.0);
    EXPECT_DOUBLE_EQ(eval("a * x + y", 1.5, 1.0, 4.0), 7.0);
    EXPECT_DOUBLE_EQ(eval("1.5e2 + .5"), 150.5);
    EXPECT_NEAR(eval("cos(pi)"), -1.0, 1e-15);
    EXPECT_NEAR(eval("sqrt(exp(log(4)))"), 2.0, 1e-15);
}

TEST(Expr, ShadowedPi)
{
    const ExprPtr e = parse_expression("pi + 1", SymbolTable{{"pi"}, {}});
    const std::vector<double> c{2.0};
    EXPECT_DOUBLE_EQ(evaluate<double>(*e, c, {}), 3.0);
}

TEST(Expr, EvaluationDomainErrors)
{
    EXPECT_THROW(eval("x^0.5", -1.0), DomainError);
    EXPECT_THROW(eval("1 / x", 0.0), DomainError);
    EXPECT_THROW(eval("log(x)", -2.0), DomainError);
    EXPECT_THROW(eval("sqrt(x)", -2.0), DomainError);
    EXPECT_THROW(eval("exp(x)", 1000.0), DomainError);
    EXPECT_DOUBLE_EQ(eval("x^3", -2.0), -8.0);
    EXPECT_DOUBLE_EQ(eval("x^2.0", -2.0), 4.0);
}

TEST(Expr, DeepNestingIsAStructuredError)
{
    const std::string deep = std::string(100000, '(') + "x" + std::string(100000, ')');
    EXPECT_THROW(parse_expression(deep, kXY), ParseError);
    EXPECT_THROW(parse_expression(std::string(100000, '-') + "x", kXY), ParseError);
    const std::string ok = std::string(50, '(') + "x" + std::string(50, ')');
    EXPECT_NO_THROW(parse_expression(ok, kXY));
}

TEST(Expr, ParserIsTotalOnRandomInput)
{
    std::mt19937_64 rng(2024);
    const std::string alphabet = "xya0123456789.eE+-*/^() sincotaexplgqrh,#\t\n\xff";
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::uniform_int_distribution<int> length(0, 40);
    int parsed = 0;
    for (int trial = 0; trial < 20000; ++trial) {
        std::string text;
        for (int n = length(rng); n > 0; --n) text.push_back(alphabet[pick(rng)]);
        try {
            const ExprPtr e = parse_expression(text, kXY);
            ++parsed;
            const std::vector<double> c{0.3, 0.7};
            const std::vector<double> p{2.0};
            try {
                evaluate<double>(*e, c, p);
            } catch (const DomainError&) {
            }
        } catch (const ParseError&) {
        }
    }
    EXPECT_GT(parsed, 0);
}

TEST(Expr, CanonicalTextRoundTrips)
{
    const std::vector<std::string> inputs{"x", "-x^2", "(x + y) * (x - y)", "2^3^2", "(2^3)^2", "-(x - y)",
                                          "a / (x * y)", "sin(x)^2 + cos(y)^2", "x - (y - 1)",
                                          "1e-300 * x", "0.1 + 0.2", "-(-x)", "x / y / a", "x / (y / a)"};
    for (const auto& text : inputs) {
        const ExprPtr e = parse_expression(text, kXY);
        const std::string canon = to_string(*e);
        const ExprPtr back = parse_expression(canon, kXY);
        EXPECT_TRUE(structurally_equal(*e, *back)) << text << " -> " << canon;
        EXPECT_EQ(to_string(*back), canon);
    }
}

TEST(Expr, OrderZeroJetsMatchPlainEvaluationOnCatalogExpressions)
{
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> jitter(-0.05, 0.05);
    for (const auto& entry : catalog()) {
        const MetricSpec spec = builtin_spec(entry.name);
        std::vector<double> params;
        for (const auto& [k, v] : spec.parameters) params.push_back(v);
        const JetLayout& L0 = jet_layout(spec.dim, 0);
        for (const auto& row : spec.components)
            for (const auto& e : row) {
                for (int trial = 0; trial < 1000; ++trial) {
                    const ChartPoint& base = spec.suggested_points[trial % spec.suggested_points.size()];
                    std::vector<double> x(spec.dim);
                    std::vector<Jet> xj;
                    for (int i = 0; i < spec.dim; ++i) {
                        x[i] = base.coords[i] + jitter(rng);
                        xj.push_back(Jet::variable(L0, i, x[i]));
                    }
                    const double plain = evaluate<double>(*e, x, params);
                    const Jet jet = evaluate<Jet>(*e, xj, params);
                    ASSERT_EQ(jet.value(), plain) << entry.name << ": " << to_string(*e);
                }
            }
    }
}
