#include "hessianlab/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <functional>

namespace hessianlab::expr {

namespace {

struct Parser {
    const std::string& src;
    const Expression::Vars& allowed;
    size_t pos = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("expression error at position " + std::to_string(pos) + " in \"" + src +
                          "\": " + what);
    }
    void skip_ws() {
        while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < src.size() && src[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos < src.size() ? src[pos] : '\0';
    }
};

} // namespace

Expression Expression::parse(const std::string& src, const Vars& allowed) {
    Expression e;
    e.src_ = src;
    Parser p{src, allowed};

    auto add_node = [&](Node n) {
        e.nodes_.push_back(n);
        return static_cast<int>(e.nodes_.size() - 1);
    };

    // recursive descent: expr := term (('+'|'-') term)*, term := unary (('*'|'/') unary)*
    std::function<int()> parse_expr;

    std::function<int()> parse_primary = [&]() -> int {
        p.skip_ws();
        if (p.pos >= src.size()) p.fail("unexpected end of input");
        const char c = src[p.pos];
        if (c == '(') {
            ++p.pos;
            const int inner = parse_expr();
            if (!p.eat(')')) p.fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            char* end = nullptr;
            const double v = std::strtod(src.c_str() + p.pos, &end);
            if (end == src.c_str() + p.pos) p.fail("bad number");
            p.pos = end - src.c_str();
            return add_node({Op::Const, -1, -1, v});
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t start = p.pos;
            while (p.pos < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[p.pos])) || src[p.pos] == '_'))
                ++p.pos;
            const std::string name = src.substr(start, p.pos - start);
            if (name == "t") {
                if (!allowed.t) p.fail("variable 't' not allowed in this expression");
                e.uses_t_ = true;
                return add_node({Op::VarT, -1, -1, 0.0});
            }
            if (name == "j") {
                if (!allowed.j) p.fail("variable 'j' not allowed in this expression");
                e.uses_j_ = true;
                return add_node({Op::VarJ, -1, -1, 0.0});
            }
            if (name == "r2") return add_node({Op::VarR2, -1, -1, 0.0});
            if (name.size() == 2 && (name[0] == 'x' || name[0] == 'y') &&
                std::isdigit(static_cast<unsigned char>(name[1]))) {
                const int slot = name[1] - '1';
                if (slot < 0 || slot >= allowed.coords)
                    p.fail("coordinate '" + name + "' outside dimension n=" +
                           std::to_string(allowed.coords));
                const int idx = 2 * slot + (name[0] == 'y' ? 1 : 0);
                return add_node({Op::Coord, -1, -1, double(idx)});
            }
            auto unary = [&](Op op) {
                if (!p.eat('(')) p.fail("expected '(' after function name");
                const int a = parse_expr();
                if (!p.eat(')')) p.fail("expected ')'");
                return add_node({op, a, -1, 0.0});
            };
            if (name == "exp") return unary(Op::Exp);
            if (name == "sin") return unary(Op::Sin);
            if (name == "cos") return unary(Op::Cos);
            if (name == "log") return unary(Op::Log);
            if (name == "abs") return unary(Op::Abs);
            if (name == "min" || name == "max") {
                if (!p.eat('(')) p.fail("expected '(' after function name");
                const int a = parse_expr();
                if (!p.eat(',')) p.fail("expected ','");
                const int b = parse_expr();
                if (!p.eat(')')) p.fail("expected ')'");
                return add_node({name == "min" ? Op::Min : Op::Max, a, b, 0.0});
            }
            p.fail("unknown identifier '" + name + "'");
        }
        p.fail(std::string("unexpected character '") + c + "'");
    };

    std::function<int()> parse_unary = [&]() -> int {
        if (p.eat('-')) return add_node({Op::Neg, parse_unary(), -1, 0.0});
        if (p.eat('+')) return parse_unary();
        return parse_primary();
    };

    std::function<int()> parse_term = [&]() -> int {
        int a = parse_unary();
        while (true) {
            if (p.eat('*'))
                a = add_node({Op::Mul, a, parse_unary(), 0.0});
            else if (p.eat('/'))
                a = add_node({Op::Div, a, parse_unary(), 0.0});
            else
                return a;
        }
    };

    parse_expr = [&]() -> int {
        int a = parse_term();
        while (true) {
            if (p.eat('+'))
                a = add_node({Op::Add, a, parse_term(), 0.0});
            else if (p.eat('-'))
                a = add_node({Op::Sub, a, parse_term(), 0.0});
            else
                return a;
        }
    };

    e.root_ = parse_expr();
    p.skip_ws();
    if (p.pos != src.size()) p.fail("trailing input");
    return e;
}

double Expression::eval_node(int idx, double t, std::span<const double> z, double j) const {
    const Node& n = nodes_[idx];
    switch (n.op) {
        case Op::Const: return n.value;
        case Op::VarT: return t;
        case Op::VarJ: return j;
        case Op::VarR2: {
            double r2 = 0.0;
            for (double x : z) r2 += x * x;
            return r2;
        }
        case Op::Coord: {
            const size_t k = static_cast<size_t>(n.value);
            return k < z.size() ? z[k] : 0.0;
        }
        case Op::Add: return eval_node(n.a, t, z, j) + eval_node(n.b, t, z, j);
        case Op::Sub: return eval_node(n.a, t, z, j) - eval_node(n.b, t, z, j);
        case Op::Mul: return eval_node(n.a, t, z, j) * eval_node(n.b, t, z, j);
        case Op::Div: return eval_node(n.a, t, z, j) / eval_node(n.b, t, z, j);
        case Op::Neg: return -eval_node(n.a, t, z, j);
        case Op::Exp: return std::exp(eval_node(n.a, t, z, j));
        case Op::Sin: return std::sin(eval_node(n.a, t, z, j));
        case Op::Cos: return std::cos(eval_node(n.a, t, z, j));
        case Op::Log: return std::log(eval_node(n.a, t, z, j));
        case Op::Abs: return std::abs(eval_node(n.a, t, z, j));
        case Op::Min:
            return std::min(eval_node(n.a, t, z, j), eval_node(n.b, t, z, j));
        case Op::Max:
            return std::max(eval_node(n.a, t, z, j), eval_node(n.b, t, z, j));
    }
    return 0.0;
}

double Expression::eval(double t, std::span<const double> z, double j) const {
    if (root_ < 0) throw ValidationError("expression not parsed");
    return eval_node(root_, t, z, j);
}

} // namespace hessianlab::expr
