#include "chaincalc/expr.hpp"

#include "chaincalc/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>

namespace chaincalc {

namespace {

struct FnEntry {
    const char* name;
    int args;
    double (*one)(double);
    double (*two)(double, double);
};

double fn_min(double a, double b) { return std::fmin(a, b); }
double fn_max(double a, double b) { return std::fmax(a, b); }

const FnEntry kFunctions[] = {
    {"abs", 1, std::fabs, nullptr},   {"sqrt", 1, std::sqrt, nullptr},
    {"exp", 1, std::exp, nullptr},    {"log", 1, std::log, nullptr},
    {"sin", 1, std::sin, nullptr},    {"cos", 1, std::cos, nullptr},
    {"tan", 1, std::tan, nullptr},    {"floor", 1, std::floor, nullptr},
    {"ceil", 1, std::ceil, nullptr},  {"min", 2, nullptr, fn_min},
    {"max", 2, nullptr, fn_max},      {"pow", 2, nullptr, std::pow},
};

struct Parser {
    const std::string& text;
    size_t pos = 0;

    [[noreturn]] void bail(const std::string& what) const {
        fail("ConfigParse",
             what + " at position " + std::to_string(pos) + " in \"" + text + "\"");
    }

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            pos++;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            pos++;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }
};

} // namespace

Expression Expression::parse(const std::string& text) {
    Expression out;
    out.text_ = text;
    Parser p{text};

    auto add_node = [&](Node n) {
        out.nodes_.push_back(n);
        return static_cast<int>(out.nodes_.size()) - 1;
    };

    // recursive descent: expr -> term -> unary -> power -> primary
    std::function<int()> expr;

    auto primary = [&]() -> int {
        char c = p.peek();
        if (c == '(') {
            p.eat('(');
            int inner = expr();
            if (!p.eat(')')) p.bail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* start = text.c_str() + p.pos;
            char* end = nullptr;
            double v = std::strtod(start, &end);
            if (end == start) p.bail("expected a number");
            p.pos += static_cast<size_t>(end - start);
            Node n;
            n.kind = Kind::constant;
            n.value = v;
            return add_node(n);
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = p.pos;
            while (p.pos < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[p.pos])) ||
                    text[p.pos] == '_'))
                p.pos++;
            std::string name = text.substr(start, p.pos - start);

            if (name == "pi") return add_node({Kind::constant, 4.0 * std::atan(1.0)});
            if (name == "e") return add_node({Kind::constant, std::exp(1.0)});
            if (name == "inf")
                return add_node({Kind::constant, std::numeric_limits<double>::infinity()});

            int var = -1;
            if (name == "x") var = 0;
            else if (name == "y") var = 1;
            else if (name == "z") var = 2;
            else if (name.size() >= 2 && name[0] == 'x' &&
                     name.find_first_not_of("0123456789", 1) == std::string::npos)
                var = std::atoi(name.c_str() + 1);
            if (var >= 0 && p.peek() != '(') {
                out.max_var_ = std::max(out.max_var_, var);
                Node n;
                n.kind = Kind::variable;
                n.var = var;
                return add_node(n);
            }

            for (size_t f = 0; f < sizeof(kFunctions) / sizeof(kFunctions[0]); ++f) {
                if (name != kFunctions[f].name) continue;
                if (!p.eat('(')) p.bail("expected '(' after " + name);
                Node n;
                n.kind = Kind::call;
                n.fn = static_cast<int>(f);
                n.a = expr();
                if (kFunctions[f].args == 2) {
                    if (!p.eat(',')) p.bail(name + " takes two arguments");
                    n.b = expr();
                }
                if (!p.eat(')')) p.bail("expected ')'");
                return add_node(n);
            }
            p.bail("unknown name \"" + name + "\"");
        }
        p.bail("expected a value");
    };

    std::function<int()> unary = [&]() -> int {
        if (p.eat('-')) {
            Node n;
            n.kind = Kind::negate;
            n.a = unary();
            return add_node(n);
        }
        p.eat('+');
        int base = primary();
        if (p.eat('^')) { // right associative, binds under a leading minus
            Node n;
            n.kind = Kind::pow_op;
            n.a = base;
            n.b = unary();
            return add_node(n);
        }
        return base;
    };

    auto term = [&]() -> int {
        int lhs = unary();
        while (true) {
            char c = p.peek();
            if (c != '*' && c != '/') return lhs;
            p.eat(c);
            Node n;
            n.kind = c == '*' ? Kind::mul : Kind::div;
            n.a = lhs;
            n.b = unary();
            lhs = add_node(n);
        }
    };

    expr = [&]() -> int {
        int lhs = term();
        while (true) {
            char c = p.peek();
            if (c != '+' && c != '-') return lhs;
            p.eat(c);
            Node n;
            n.kind = c == '+' ? Kind::add : Kind::sub;
            n.a = lhs;
            n.b = term();
            lhs = add_node(n);
        }
    };

    p.skip_ws();
    if (p.pos == text.size()) p.bail("empty expression");
    out.root_ = expr();
    p.skip_ws();
    if (p.pos != text.size()) p.bail("unexpected trailing input");
    return out;
}

double Expression::eval_node(int id, const std::vector<double>& coords) const {
    const Node& n = nodes_[id];
    switch (n.kind) {
    case Kind::constant: return n.value;
    case Kind::variable:
        if (n.var >= static_cast<int>(coords.size()))
            fail("ConfigParse", "expression \"" + text_ + "\" references x" +
                                    std::to_string(n.var) + " but only " +
                                    std::to_string(coords.size()) +
                                    " coordinate(s) are available");
        return coords[n.var];
    case Kind::negate: return -eval_node(n.a, coords);
    case Kind::add: return eval_node(n.a, coords) + eval_node(n.b, coords);
    case Kind::sub: return eval_node(n.a, coords) - eval_node(n.b, coords);
    case Kind::mul: return eval_node(n.a, coords) * eval_node(n.b, coords);
    case Kind::div: return eval_node(n.a, coords) / eval_node(n.b, coords);
    case Kind::pow_op: return std::pow(eval_node(n.a, coords), eval_node(n.b, coords));
    case Kind::call: {
        const FnEntry& f = kFunctions[n.fn];
        if (f.args == 1) return f.one(eval_node(n.a, coords));
        return f.two(eval_node(n.a, coords), eval_node(n.b, coords));
    }
    }
    return 0.0;
}

double Expression::eval(const std::vector<double>& coords) const {
    return eval_node(root_, coords);
}

} // namespace chaincalc
