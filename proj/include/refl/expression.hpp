#pragma once

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "refl/errors.hpp"

namespace refl {

// Arithmetic expressions in the variable t. Precedence (loosest to tightest):
// + -, * /, unary -, ^ (right-associative), so -2^2 = -4 and 2^3^2 = 512.
class Expression {
public:
    static Expression parse(const std::string& src) {
        Expression e;
        e.source_ = src;
        Parser p{src, 0, &e.nodes_};
        int root = p.parse_expr();
        p.skip_ws();
        if (p.pos != src.size())
            throw ParseError("expression: unexpected trailing input", static_cast<long>(p.pos));
        e.root_ = root;
        return e;
    }

    double eval(double t) const { return eval_node(root_, t); }

    const std::string& source() const { return source_; }

private:
    enum class Kind { number, var_t, add, sub, mul, div, pow, neg, fn_sin, fn_cos, fn_exp, fn_sinh, fn_cosh };

    struct Node {
        Kind kind;
        double value = 0.0;
        int a = -1, b = -1;
    };

    struct Parser {
        const std::string& src;
        std::size_t pos;
        std::vector<Node>* nodes;

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
        int push(Node n) {
            nodes->push_back(n);
            return static_cast<int>(nodes->size()) - 1;
        }

        int parse_expr() {
            int lhs = parse_term();
            for (;;) {
                if (eat('+'))
                    lhs = push({Kind::add, 0.0, lhs, parse_term()});
                else if (eat('-'))
                    lhs = push({Kind::sub, 0.0, lhs, parse_term()});
                else
                    return lhs;
            }
        }
        int parse_term() {
            int lhs = parse_factor();
            for (;;) {
                if (eat('*'))
                    lhs = push({Kind::mul, 0.0, lhs, parse_factor()});
                else if (eat('/'))
                    lhs = push({Kind::div, 0.0, lhs, parse_factor()});
                else
                    return lhs;
            }
        }
        int parse_factor() {
            if (eat('-')) return push({Kind::neg, 0.0, parse_factor(), -1});
            return parse_power();
        }
        int parse_power() {
            int base = parse_primary();
            if (eat('^')) return push({Kind::pow, 0.0, base, parse_factor()});
            return base;
        }
        int parse_primary() {
            skip_ws();
            if (pos >= src.size())
                throw ParseError("expression: unexpected end of input", static_cast<long>(pos));
            char c = src[pos];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
            if (c == '(') {
                ++pos;
                int inner = parse_expr();
                if (!eat(')'))
                    throw ParseError("expression: expected ')'", static_cast<long>(pos));
                return inner;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
            throw ParseError(std::string("expression: unexpected character '") + c + "'",
                             static_cast<long>(pos));
        }
        int parse_number() {
            const char* begin = src.c_str() + pos;
            char* end = nullptr;
            double v = std::strtod(begin, &end);
            if (end == begin)
                throw ParseError("expression: malformed number", static_cast<long>(pos));
            pos += static_cast<std::size_t>(end - begin);
            return push({Kind::number, v, -1, -1});
        }
        int parse_ident() {
            std::size_t start = pos;
            while (pos < src.size() && (std::isalnum(static_cast<unsigned char>(src[pos])) ||
                                        src[pos] == '_'))
                ++pos;
            std::string name = src.substr(start, pos - start);
            if (name == "t") return push({Kind::var_t, 0.0, -1, -1});
            if (name == "pi") return push({Kind::number, 3.14159265358979323846, -1, -1});
            Kind k;
            if (name == "sin") k = Kind::fn_sin;
            else if (name == "cos") k = Kind::fn_cos;
            else if (name == "exp") k = Kind::fn_exp;
            else if (name == "sinh") k = Kind::fn_sinh;
            else if (name == "cosh") k = Kind::fn_cosh;
            else
                throw ParseError("expression: unknown identifier '" + name + "'",
                                 static_cast<long>(start));
            if (!eat('('))
                throw ParseError("expression: expected '(' after function name",
                                 static_cast<long>(pos));
            int arg = parse_expr();
            if (!eat(')'))
                throw ParseError("expression: expected ')'", static_cast<long>(pos));
            return push({k, 0.0, arg, -1});
        }
    };

    double eval_node(int idx, double t) const {
        const Node& n = nodes_[static_cast<std::size_t>(idx)];
        switch (n.kind) {
            case Kind::number: return n.value;
            case Kind::var_t: return t;
            case Kind::add: return eval_node(n.a, t) + eval_node(n.b, t);
            case Kind::sub: return eval_node(n.a, t) - eval_node(n.b, t);
            case Kind::mul: return eval_node(n.a, t) * eval_node(n.b, t);
            case Kind::div: {
                double den = eval_node(n.b, t);
                if (den == 0.0) throw EvalError("expression: division by zero");
                return eval_node(n.a, t) / den;
            }
            case Kind::pow: {
                double v = std::pow(eval_node(n.a, t), eval_node(n.b, t));
                if (!std::isfinite(v))
                    throw EvalError("expression: power result is not finite");
                return v;
            }
            case Kind::neg: return -eval_node(n.a, t);
            case Kind::fn_sin: return std::sin(eval_node(n.a, t));
            case Kind::fn_cos: return std::cos(eval_node(n.a, t));
            case Kind::fn_exp: return std::exp(eval_node(n.a, t));
            case Kind::fn_sinh: return std::sinh(eval_node(n.a, t));
            case Kind::fn_cosh: return std::cosh(eval_node(n.a, t));
        }
        throw EvalError("expression: corrupt node");
    }

    std::string source_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

} // namespace refl
