#include "tcurv/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <numbers>
#include <utility>

namespace tcurv {

namespace {

constexpr std::array<std::pair<std::string_view, Function>, 9> kFunctions{{
    {"sin", Function::Sin},
    {"cos", Function::Cos},
    {"tan", Function::Tan},
    {"exp", Function::Exp},
    {"log", Function::Log},
    {"sqrt", Function::Sqrt},
    {"sinh", Function::Sinh},
    {"cosh", Function::Cosh},
    {"tanh", Function::Tanh},
}};

ExprPtr make_binary(Expr::Kind kind, ExprPtr lhs, ExprPtr rhs)
{
    auto e = std::make_shared<Expr>();
    e->kind = kind;
    e->lhs = std::move(lhs);
    e->rhs = std::move(rhs);
    return e;
}

std::shared_ptr<Expr> make_unary(Expr::Kind kind, ExprPtr operand)
{
    auto e = std::make_shared<Expr>();
    e->kind = kind;
    e->lhs = std::move(operand);
    return e;
}

class Parser {
public:
    Parser(std::string_view text, const SymbolTable& symbols) : text_(text), symbols_(symbols) {}

    ExprPtr parse()
    {
        ExprPtr e = expression();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

    void skip_space()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c)
    {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    ExprPtr expression()
    {
        ExprPtr lhs = term();
        for (;;) {
            if (accept('+'))
                lhs = make_binary(Expr::Kind::Add, lhs, term());
            else if (accept('-'))
                lhs = make_binary(Expr::Kind::Sub, lhs, term());
            else
                return lhs;
        }
    }

    ExprPtr term()
    {
        ExprPtr lhs = unary();
        for (;;) {
            if (accept('*'))
                lhs = make_binary(Expr::Kind::Mul, lhs, unary());
            else if (accept('/'))
                lhs = make_binary(Expr::Kind::Div, lhs, unary());
            else
                return lhs;
        }
    }

    struct DepthGuard {
        int& depth;
        DepthGuard(int& d, const Parser& p) : depth(d)
        {
            // Bounds recursion on adversarial input like "((((((..." or "------...".
            if (++depth > 512) p.fail("expression nested too deeply");
        }
        ~DepthGuard() { --depth; }
    };

    ExprPtr unary()
    {
        DepthGuard guard(depth_, *this);
        if (accept('-')) return make_unary(Expr::Kind::Negate, unary());
        if (accept('+')) return unary();
        return power();
    }

    ExprPtr power()
    {
        ExprPtr base = primary();
        if (accept('^')) return make_binary(Expr::Kind::Pow, base, unary());
        return base;
    }

    ExprPtr primary()
    {
        DepthGuard guard(depth_, *this);
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            ExprPtr inner = expression();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
        fail("unexpected '" + std::string(1, c) + "'");
    }

    ExprPtr number()
    {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
            ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
            if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
                pos_ = p;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            }
        }
        double v = 0.0;
        const auto* first = text_.data() + start;
        const auto* last = text_.data() + pos_;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last) {
            pos_ = start;
            fail("malformed number");
        }
        auto e = std::make_shared<Expr>();
        e->kind = Expr::Kind::Constant;
        e->value = v;
        return e;
    }

    ExprPtr name()
    {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string_view id = text_.substr(start, pos_ - start);

        skip_space();
        if (pos_ < text_.size() && text_[pos_] == '(') {
            for (const auto& [fname, fn] : kFunctions) {
                if (fname != id) continue;
                ++pos_;
                ExprPtr arg = expression();
                skip_space();
                if (pos_ < text_.size() && text_[pos_] == ',')
                    fail(std::string(id) + " takes exactly one argument");
                if (!accept(')')) fail("expected ')'");
                auto e = make_unary(Expr::Kind::Call, arg);
                e->function = fn;
                return e;
            }
            pos_ = start;
            fail("unknown function '" + std::string(id) + "'");
        }

        for (std::size_t i = 0; i < symbols_.coordinates.size(); ++i) {
            if (symbols_.coordinates[i] != id) continue;
            auto e = std::make_shared<Expr>();
            e->kind = Expr::Kind::Coordinate;
            e->index = static_cast<int>(i);
            e->name = std::string(id);
            return e;
        }
        for (std::size_t i = 0; i < symbols_.parameters.size(); ++i) {
            if (symbols_.parameters[i] != id) continue;
            auto e = std::make_shared<Expr>();
            e->kind = Expr::Kind::Parameter;
            e->index = static_cast<int>(i);
            e->name = std::string(id);
            return e;
        }
        if (id == "pi") {
            auto e = std::make_shared<Expr>();
            e->kind = Expr::Kind::Constant;
            e->value = std::numbers::pi;
            return e;
        }
        for (const auto& [fname, fn] : kFunctions) {
            if (fname == id) {
                pos_ = start;
                fail(std::string(id) + " takes exactly one argument");
            }
        }
        pos_ = start;
        fail("unknown identifier '" + std::string(id) + "'");
    }

    std::string_view text_;
    const SymbolTable& symbols_;
    std::size_t pos_ = 0;
    int depth_ = 0;
};

int precedence(const Expr& e)
{
    switch (e.kind) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub: return 1;
    case Expr::Kind::Mul:
    case Expr::Kind::Div: return 2;
    case Expr::Kind::Negate: return 3;
    case Expr::Kind::Pow: return 4;
    default: return 5;
    }
}

void print(const Expr& e, std::string& out);

void print_child(const Expr& child, bool wrap, std::string& out)
{
    if (wrap) out += '(';
    print(child, out);
    if (wrap) out += ')';
}

void print(const Expr& e, std::string& out)
{
    using K = Expr::Kind;
    switch (e.kind) {
    case K::Constant: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", e.value);
        out += buf;
        return;
    }
    case K::Coordinate:
    case K::Parameter: out += e.name; return;
    case K::Negate:
        out += '-';
        print_child(*e.lhs, precedence(*e.lhs) < 4, out);
        return;
    case K::Call:
        out += function_name(e.function);
        out += '(';
        print(*e.lhs, out);
        out += ')';
        return;
    case K::Pow:
        print_child(*e.lhs, precedence(*e.lhs) <= 4, out);
        out += '^';
        print_child(*e.rhs, precedence(*e.rhs) < 4, out);
        return;
    default: break;
    }
    const int p = precedence(e);
    const char op = e.kind == K::Add ? '+' : e.kind == K::Sub ? '-' : e.kind == K::Mul ? '*' : '/';
    // Left-associative: the right operand needs parentheses at equal precedence.
    print_child(*e.lhs, precedence(*e.lhs) < p || precedence(*e.lhs) == 3, out);
    out += ' ';
    out += op;
    out += ' ';
    print_child(*e.rhs, precedence(*e.rhs) <= p || precedence(*e.rhs) == 3, out);
}

} // namespace

ExprPtr parse_expression(std::string_view text, const SymbolTable& symbols)
{
    return Parser(text, symbols).parse();
}

std::string_view function_name(Function f)
{
    for (const auto& [name, fn] : kFunctions)
        if (fn == f) return name;
    return "?";
}

std::string to_string(const Expr& e)
{
    std::string out;
    print(e, out);
    return out;
}

bool structurally_equal(const Expr& a, const Expr& b)
{
    if (a.kind != b.kind) return false;
    using K = Expr::Kind;
    switch (a.kind) {
    case K::Constant: return a.value == b.value;
    case K::Coordinate:
    case K::Parameter: return a.index == b.index && a.name == b.name;
    case K::Negate: return structurally_equal(*a.lhs, *b.lhs);
    case K::Call: return a.function == b.function && structurally_equal(*a.lhs, *b.lhs);
    default: return structurally_equal(*a.lhs, *b.lhs) && structurally_equal(*a.rhs, *b.rhs);
    }
}

} // namespace tcurv
