#include "hcopt/expression.hpp"

#include <cctype>
#include <cmath>

namespace hcopt {

namespace {

ExprPtr make(Expr::Kind kind, std::vector<ExprPtr> kids = {}, double value = 0.0, int var = 0) {
    auto e = std::make_shared<Expr>();
    e->kind = kind;
    e->kids = std::move(kids);
    e->value = value;
    e->var = var;
    return e;
}

struct Parser {
    const std::string& text;
    std::size_t pos = 0;
    int dim;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    ExprPtr parse() {
        ExprPtr e = expr();
        skip_ws();
        if (pos != text.size()) throw ParseError("unexpected trailing input", pos);
        return e;
    }

    ExprPtr expr() {
        ExprPtr lhs = term();
        for (;;) {
            if (eat('+'))
                lhs = make(Expr::Kind::Add, {lhs, term()});
            else if (eat('-'))
                lhs = make(Expr::Kind::Sub, {lhs, term()});
            else
                return lhs;
        }
    }

    ExprPtr term() {
        ExprPtr lhs = unary();
        for (;;) {
            if (eat('*'))
                lhs = make(Expr::Kind::Mul, {lhs, unary()});
            else if (eat('/'))
                lhs = make(Expr::Kind::Div, {lhs, unary()});
            else
                return lhs;
        }
    }

    ExprPtr unary() {
        if (eat('-')) return make(Expr::Kind::Neg, {unary()});
        return power();
    }

    ExprPtr power() {
        ExprPtr base = atom();
        if (eat('^')) {
            double e = number();
            return make(Expr::Kind::Pow, {base}, e);
        }
        return base;
    }

    double number() {
        skip_ws();
        std::size_t start = pos;
        bool neg = eat('-');
        skip_ws();
        std::size_t digits = pos;
        while (pos < text.size() &&
               (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.' ||
                text[pos] == 'e' || text[pos] == 'E' ||
                ((text[pos] == '+' || text[pos] == '-') &&
                 (text[pos - 1] == 'e' || text[pos - 1] == 'E'))))
            ++pos;
        if (pos == digits) throw ParseError("number expected", start);
        double v = std::stod(text.substr(digits, pos - digits));
        return neg ? -v : v;
    }

    ExprPtr atom() {
        skip_ws();
        if (pos >= text.size()) throw ParseError("unexpected end of expression", pos);
        char c = text[pos];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return make(Expr::Kind::Const, {}, number());
        if (c == '(') {
            ++pos;
            ExprPtr e = expr();
            if (!eat(')')) throw ParseError("')' expected", pos);
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos;
            while (pos < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
                ++pos;
            std::string word = text.substr(start, pos - start);
            if (word.size() >= 2 && word[0] == 'x' &&
                std::isdigit(static_cast<unsigned char>(word[1]))) {
                int idx = std::stoi(word.substr(1));
                if (idx < 1 || idx > dim)
                    throw ParseError("variable " + word + " out of range 1.." +
                                         std::to_string(dim),
                                     start);
                return make(Expr::Kind::Var, {}, 0.0, idx - 1);
            }
            if (word == "min" || word == "max" || word == "abs" || word == "pow") {
                if (!eat('(')) throw ParseError("'(' expected after " + word, pos);
                std::vector<ExprPtr> args;
                args.push_back(expr());
                while (eat(',')) args.push_back(expr());
                if (!eat(')')) throw ParseError("')' expected", pos);
                if (word == "abs") {
                    if (args.size() != 1) throw ParseError("abs takes one argument", start);
                    return make(Expr::Kind::Abs, std::move(args));
                }
                if (word == "pow") {
                    if (args.size() != 2 || args[1]->kind != Expr::Kind::Const)
                        throw ParseError("pow takes (expr, literal)", start);
                    return make(Expr::Kind::Pow, {args[0]}, args[1]->value);
                }
                if (args.size() < 2) throw ParseError(word + " takes two+ arguments", start);
                return make(word == "min" ? Expr::Kind::Min : Expr::Kind::Max, std::move(args));
            }
            throw ParseError("unknown identifier '" + word + "'", start);
        }
        throw ParseError(std::string("unexpected character '") + c + "'", pos);
    }
};

// forward-mode dual numbers for smooth gradients
struct Dual {
    double v = 0.0, d = 0.0;
};

Dual eval_dual(const Expr& e, const Vec& x, int axis) {
    switch (e.kind) {
        case Expr::Kind::Const: return {e.value, 0.0};
        case Expr::Kind::Var: return {x[e.var], e.var == axis ? 1.0 : 0.0};
        case Expr::Kind::Add: {
            Dual a = eval_dual(*e.kids[0], x, axis), b = eval_dual(*e.kids[1], x, axis);
            return {a.v + b.v, a.d + b.d};
        }
        case Expr::Kind::Sub: {
            Dual a = eval_dual(*e.kids[0], x, axis), b = eval_dual(*e.kids[1], x, axis);
            return {a.v - b.v, a.d - b.d};
        }
        case Expr::Kind::Mul: {
            Dual a = eval_dual(*e.kids[0], x, axis), b = eval_dual(*e.kids[1], x, axis);
            return {a.v * b.v, a.d * b.v + a.v * b.d};
        }
        case Expr::Kind::Div: {
            Dual a = eval_dual(*e.kids[0], x, axis), b = eval_dual(*e.kids[1], x, axis);
            return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
        }
        case Expr::Kind::Neg: {
            Dual a = eval_dual(*e.kids[0], x, axis);
            return {-a.v, -a.d};
        }
        case Expr::Kind::Pow: {
            Dual a = eval_dual(*e.kids[0], x, axis);
            double p = e.value;
            return {std::pow(a.v, p), p * std::pow(a.v, p - 1.0) * a.d};
        }
        default: throw std::logic_error("eval_dual: nonsmooth node");
    }
}

} // namespace

ExprPtr parse_expression(const std::string& text, int dim) {
    Parser p{text, 0, dim};
    return p.parse();
}

bool expr_is_constant(const ExprPtr& e) {
    if (e->kind == Expr::Kind::Var) return false;
    for (const auto& k : e->kids)
        if (!expr_is_constant(k)) return false;
    return true;
}

bool expr_is_smooth(const ExprPtr& e) {
    if (e->kind == Expr::Kind::Min || e->kind == Expr::Kind::Max || e->kind == Expr::Kind::Abs)
        return false;
    for (const auto& k : e->kids)
        if (!expr_is_smooth(k)) return false;
    return true;
}

bool expr_is_affine(const ExprPtr& e) {
    switch (e->kind) {
        case Expr::Kind::Const: return true;
        case Expr::Kind::Var: return true;
        case Expr::Kind::Add:
        case Expr::Kind::Sub: return expr_is_affine(e->kids[0]) && expr_is_affine(e->kids[1]);
        case Expr::Kind::Neg: return expr_is_affine(e->kids[0]);
        case Expr::Kind::Mul:
            return (expr_is_constant(e->kids[0]) && expr_is_affine(e->kids[1])) ||
                   (expr_is_constant(e->kids[1]) && expr_is_affine(e->kids[0]));
        case Expr::Kind::Div: return expr_is_affine(e->kids[0]) && expr_is_constant(e->kids[1]);
        case Expr::Kind::Pow:
            return expr_is_constant(e->kids[0]) || e->value == 1.0 ||
                   (e->value == 0.0 && true);
        default: return false;
    }
}

double eval_expression(const ExprPtr& e, const Vec& x) {
    switch (e->kind) {
        case Expr::Kind::Const: return e->value;
        case Expr::Kind::Var: return x[e->var];
        case Expr::Kind::Add: return eval_expression(e->kids[0], x) + eval_expression(e->kids[1], x);
        case Expr::Kind::Sub: return eval_expression(e->kids[0], x) - eval_expression(e->kids[1], x);
        case Expr::Kind::Mul: return eval_expression(e->kids[0], x) * eval_expression(e->kids[1], x);
        case Expr::Kind::Div: return eval_expression(e->kids[0], x) / eval_expression(e->kids[1], x);
        case Expr::Kind::Neg: return -eval_expression(e->kids[0], x);
        case Expr::Kind::Pow: return std::pow(eval_expression(e->kids[0], x), e->value);
        case Expr::Kind::Abs: return std::fabs(eval_expression(e->kids[0], x));
        case Expr::Kind::Min: {
            double m = eval_expression(e->kids[0], x);
            for (std::size_t i = 1; i < e->kids.size(); ++i)
                m = std::min(m, eval_expression(e->kids[i], x));
            return m;
        }
        case Expr::Kind::Max: {
            double m = eval_expression(e->kids[0], x);
            for (std::size_t i = 1; i < e->kids.size(); ++i)
                m = std::max(m, eval_expression(e->kids[i], x));
            return m;
        }
    }
    return 0.0;
}

namespace {

FunctionHandle compile_smooth(const ExprPtr& e, int dim, std::string label) {
    if (expr_is_affine(e)) {
        Vec zero(dim, 0.0);
        Vec a(dim);
        for (int i = 0; i < dim; ++i) a[i] = eval_dual(*e, zero, i).d;
        double c = eval_expression(e, zero);
        FunctionHandle f = FunctionHandle::affine(std::move(a), c, label);
        return f;
    }
    FunctionHandle f = FunctionHandle::smooth(
        dim, [e](const Vec& x) { return eval_expression(e, x); },
        [e, dim](const Vec& x) {
            Vec g(dim);
            for (int i = 0; i < dim; ++i) g[i] = eval_dual(*e, x, i).d;
            return g;
        },
        label);
    return f;
}

FunctionHandle compile_node(const ExprPtr& e, int dim) {
    if (expr_is_smooth(e)) return compile_smooth(e, dim, "");
    switch (e->kind) {
        case Expr::Kind::Add:
            return FunctionHandle::sum({compile_node(e->kids[0], dim), compile_node(e->kids[1], dim)});
        case Expr::Kind::Sub:
            return FunctionHandle::difference(compile_node(e->kids[0], dim),
                                              compile_node(e->kids[1], dim));
        case Expr::Kind::Neg: return FunctionHandle::scale(compile_node(e->kids[0], dim), -1.0);
        case Expr::Kind::Mul: {
            if (expr_is_constant(e->kids[0]))
                return FunctionHandle::scale(compile_node(e->kids[1], dim),
                                             eval_expression(e->kids[0], Vec(dim, 0.0)));
            if (expr_is_constant(e->kids[1]))
                return FunctionHandle::scale(compile_node(e->kids[0], dim),
                                             eval_expression(e->kids[1], Vec(dim, 0.0)));
            throw ParseError("products of nonsmooth expressions are not supported", 0);
        }
        case Expr::Kind::Div: {
            if (expr_is_constant(e->kids[1]))
                return FunctionHandle::scale(compile_node(e->kids[0], dim),
                                             1.0 / eval_expression(e->kids[1], Vec(dim, 0.0)));
            throw ParseError("division by a nonsmooth expression is not supported", 0);
        }
        case Expr::Kind::Abs: return FunctionHandle::abs_of(compile_node(e->kids[0], dim));
        case Expr::Kind::Min:
        case Expr::Kind::Max: {
            std::vector<FunctionHandle> kids;
            for (const auto& k : e->kids) kids.push_back(compile_node(k, dim));
            return e->kind == Expr::Kind::Min ? FunctionHandle::min_of(kids)
                                              : FunctionHandle::max_of(kids);
        }
        case Expr::Kind::Pow: throw ParseError("powers of nonsmooth expressions are not supported", 0);
        default: throw ParseError("unsupported nonsmooth construction", 0);
    }
}

} // namespace

FunctionHandle compile_expression(const ExprPtr& e, int dim, std::string label) {
    FunctionHandle f = compile_node(e, dim);
    if (!label.empty()) f.label = std::move(label);
    return f;
}

FunctionHandle compile_expression(const std::string& text, int dim) {
    FunctionHandle f = compile_expression(parse_expression(text, dim), dim, text);
    return f;
}

} // namespace hcopt
