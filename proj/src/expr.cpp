#include "sturm/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "sturm/error.hpp"

namespace sturm {

struct Expression::Node {
    Op op = Op::Constant;
    double value = 0.0;
    std::shared_ptr<const Node> a;
    std::shared_ptr<const Node> b;
    bool constant = true;
    std::size_t count = 1;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

bool is_unary(Op op) {
    switch (op) {
        case Op::Neg:
        case Op::Sin:
        case Op::Cos:
        case Op::Exp:
        case Op::Log:
        case Op::Sqrt:
        case Op::Tanh:
            return true;
        default:
            return false;
    }
}

const char* function_name(Op op) {
    switch (op) {
        case Op::Sin: return "sin";
        case Op::Cos: return "cos";
        case Op::Exp: return "exp";
        case Op::Log: return "log";
        case Op::Sqrt: return "sqrt";
        case Op::Tanh: return "tanh";
        default: return "";
    }
}

double checked(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw DomainError(std::string("non-finite result in ") + what);
    }
    return v;
}

bool is_integer(double v) { return std::isfinite(v) && v == std::floor(v); }

double pow_value(double base, double exponent) {
    if (base < 0.0 && !is_integer(exponent)) {
        throw DomainError("negative base raised to a non-integer power");
    }
    if (base == 0.0 && exponent < 0.0) {
        throw DomainError("division by zero in power");
    }
    return checked(std::pow(base, exponent), "power");
}

double eval_node(const Expression::Node& n, double x) {
    switch (n.op) {
        case Op::Constant: return n.value;
        case Op::Variable: return x;
        case Op::Add: return checked(eval_node(*n.a, x) + eval_node(*n.b, x), "addition");
        case Op::Sub: return checked(eval_node(*n.a, x) - eval_node(*n.b, x), "subtraction");
        case Op::Mul: return checked(eval_node(*n.a, x) * eval_node(*n.b, x), "product");
        case Op::Div: {
            const double den = eval_node(*n.b, x);
            if (den == 0.0) throw DomainError("division by zero");
            return checked(eval_node(*n.a, x) / den, "quotient");
        }
        case Op::Pow: return pow_value(eval_node(*n.a, x), eval_node(*n.b, x));
        case Op::Neg: return -eval_node(*n.a, x);
        case Op::Sin: return std::sin(eval_node(*n.a, x));
        case Op::Cos: return std::cos(eval_node(*n.a, x));
        case Op::Exp: return checked(std::exp(eval_node(*n.a, x)), "exp");
        case Op::Log: {
            const double v = eval_node(*n.a, x);
            if (v <= 0.0) throw DomainError("log of a non-positive value");
            return std::log(v);
        }
        case Op::Sqrt: {
            const double v = eval_node(*n.a, x);
            if (v < 0.0) throw DomainError("sqrt of a negative value");
            return std::sqrt(v);
        }
        case Op::Tanh: return std::tanh(eval_node(*n.a, x));
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Truncated power series. s[k] = f^(k)(x0) / k!.

using Series = std::vector<double>;

Series series_mul(const Series& a, const Series& b) {
    const std::size_t n = a.size();
    Series c(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j <= k; ++j) s += a[j] * b[k - j];
        c[k] = s;
    }
    return c;
}

Series series_div(const Series& a, const Series& b) {
    if (b[0] == 0.0) throw DomainError("division by zero");
    const std::size_t n = a.size();
    Series c(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double s = a[k];
        for (std::size_t j = 1; j <= k; ++j) s -= b[j] * c[k - j];
        c[k] = s / b[0];
    }
    return c;
}

Series series_exp(const Series& a) {
    const std::size_t n = a.size();
    Series e(n, 0.0);
    e[0] = checked(std::exp(a[0]), "exp");
    for (std::size_t k = 1; k < n; ++k) {
        double s = 0.0;
        for (std::size_t j = 1; j <= k; ++j) s += double(j) * a[j] * e[k - j];
        e[k] = s / double(k);
    }
    return e;
}

Series series_log(const Series& a) {
    if (a[0] <= 0.0) throw DomainError("log of a non-positive value");
    const std::size_t n = a.size();
    Series l(n, 0.0);
    l[0] = std::log(a[0]);
    for (std::size_t k = 1; k < n; ++k) {
        double s = 0.0;
        for (std::size_t j = 1; j < k; ++j) s += double(j) * l[j] * a[k - j];
        l[k] = (a[k] - s / double(k)) / a[0];
    }
    return l;
}

void series_sincos(const Series& a, Series& s, Series& c) {
    const std::size_t n = a.size();
    s.assign(n, 0.0);
    c.assign(n, 0.0);
    s[0] = std::sin(a[0]);
    c[0] = std::cos(a[0]);
    for (std::size_t k = 1; k < n; ++k) {
        double ss = 0.0;
        double cc = 0.0;
        for (std::size_t j = 1; j <= k; ++j) {
            ss += double(j) * a[j] * c[k - j];
            cc += double(j) * a[j] * s[k - j];
        }
        s[k] = ss / double(k);
        c[k] = -cc / double(k);
    }
}

Series series_sqrt(const Series& a) {
    if (a[0] < 0.0) throw DomainError("sqrt of a negative value");
    const std::size_t n = a.size();
    if (a[0] == 0.0 && n > 1) throw DomainError("sqrt is not differentiable at 0");
    Series r(n, 0.0);
    r[0] = std::sqrt(a[0]);
    for (std::size_t k = 1; k < n; ++k) {
        double s = a[k];
        for (std::size_t j = 1; j < k; ++j) s -= r[j] * r[k - j];
        r[k] = s / (2.0 * r[0]);
    }
    return r;
}

Series series_tanh(const Series& a) {
    const std::size_t n = a.size();
    Series t(n, 0.0);
    Series d(n, 0.0);  // 1 - t^2
    t[0] = std::tanh(a[0]);
    d[0] = 1.0 - t[0] * t[0];
    for (std::size_t k = 1; k < n; ++k) {
        double s = 0.0;
        for (std::size_t j = 1; j <= k; ++j) s += double(j) * a[j] * d[k - j];
        t[k] = s / double(k);
        double sq = 0.0;
        for (std::size_t j = 0; j <= k; ++j) sq += t[j] * t[k - j];
        d[k] = -sq;
    }
    return t;
}

Series series_ipow(Series base, long long e) {
    const std::size_t n = base.size();
    Series result(n, 0.0);
    result[0] = 1.0;
    bool negative = e < 0;
    unsigned long long m = negative ? static_cast<unsigned long long>(-e) : static_cast<unsigned long long>(e);
    while (m > 0) {
        if (m & 1ULL) result = series_mul(result, base);
        m >>= 1ULL;
        if (m > 0) base = series_mul(base, base);
    }
    if (negative) {
        Series one(n, 0.0);
        one[0] = 1.0;
        result = series_div(one, result);
    }
    return result;
}

Series series_pow(const Series& a, const Series& b, bool exponent_constant) {
    const std::size_t n = a.size();
    if (!exponent_constant) {
        if (a[0] <= 0.0) throw DomainError("variable exponent requires a positive base");
        return series_exp(series_mul(b, series_log(a)));
    }
    const double p = b[0];
    if (is_integer(p) && std::fabs(p) <= 64.0 && (a[0] == 0.0 || n == 1 || p >= 0.0)) {
        return series_ipow(a, static_cast<long long>(p));
    }
    if (a[0] == 0.0) {
        if (n == 1 && p > 0.0) return Series{0.0};
        throw DomainError("power is not differentiable at a zero base");
    }
    Series r(n, 0.0);
    r[0] = pow_value(a[0], p);
    for (std::size_t k = 1; k < n; ++k) {
        double s = 0.0;
        for (std::size_t j = 1; j <= k; ++j) s += ((p + 1.0) * double(j) - double(k)) * a[j] * r[k - j];
        r[k] = s / (double(k) * a[0]);
    }
    return r;
}

Series series_node(const Expression::Node& n, double x, std::size_t len) {
    switch (n.op) {
        case Op::Constant: {
            Series s(len, 0.0);
            s[0] = n.value;
            return s;
        }
        case Op::Variable: {
            Series s(len, 0.0);
            s[0] = x;
            if (len > 1) s[1] = 1.0;
            return s;
        }
        case Op::Add:
        case Op::Sub: {
            Series a = series_node(*n.a, x, len);
            const Series b = series_node(*n.b, x, len);
            const double sign = n.op == Op::Add ? 1.0 : -1.0;
            for (std::size_t k = 0; k < len; ++k) a[k] += sign * b[k];
            return a;
        }
        case Op::Mul: return series_mul(series_node(*n.a, x, len), series_node(*n.b, x, len));
        case Op::Div: return series_div(series_node(*n.a, x, len), series_node(*n.b, x, len));
        case Op::Pow:
            return series_pow(series_node(*n.a, x, len), series_node(*n.b, x, len), n.b->constant);
        case Op::Neg: {
            Series a = series_node(*n.a, x, len);
            for (double& v : a) v = -v;
            return a;
        }
        case Op::Sin:
        case Op::Cos: {
            Series s;
            Series c;
            series_sincos(series_node(*n.a, x, len), s, c);
            return n.op == Op::Sin ? s : c;
        }
        case Op::Exp: return series_exp(series_node(*n.a, x, len));
        case Op::Log: return series_log(series_node(*n.a, x, len));
        case Op::Sqrt: return series_sqrt(series_node(*n.a, x, len));
        case Op::Tanh: return series_tanh(series_node(*n.a, x, len));
    }
    return Series(len, 0.0);
}

bool same_tree(const Expression::Node* a, const Expression::Node* b) {
    if (a == b) return true;
    if (a == nullptr || b == nullptr) return false;
    if (a->op != b->op) return false;
    if (a->op == Op::Constant) return a->value == b->value;
    return same_tree(a->a.get(), b->a.get()) && same_tree(a->b.get(), b->b.get());
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    Expression run() {
        skip_space();
        if (pos_ >= src_.size()) throw ParseError("empty expression", pos_);
        Expression e = expr();
        skip_space();
        if (pos_ < src_.size()) {
            throw ParseError("unexpected '" + std::string(1, src_[pos_]) + "'", pos_);
        }
        return e;
    }

private:
    void skip_space() {
        while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
                                      src_[pos_] == '\r')) {
            ++pos_;
        }
    }

    // Length of a minus sign at the cursor (1 for '-', 3 for U+2212), else 0.
    std::size_t minus_at() const {
        if (pos_ < src_.size() && src_[pos_] == '-') return 1;
        if (src_.substr(pos_, 3) == "\xE2\x88\x92") return 3;
        return 0;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const {
        if (pos_ >= src_.size()) throw ParseError(what + ", found end of input", pos_);
        throw ParseError(what + ", found '" + std::string(1, src_[pos_]) + "'", pos_);
    }

    Expression expr() {
        Expression lhs = term();
        for (;;) {
            skip_space();
            if (accept('+')) {
                lhs = Expression::binary(Op::Add, lhs, term());
            } else if (std::size_t m = minus_at()) {
                pos_ += m;
                lhs = Expression::binary(Op::Sub, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    Expression term() {
        Expression lhs = factor();
        for (;;) {
            if (accept('*')) {
                lhs = Expression::binary(Op::Mul, lhs, factor());
            } else if (accept('/')) {
                lhs = Expression::binary(Op::Div, lhs, factor());
            } else {
                return lhs;
            }
        }
    }

    Expression factor() {
        Expression base = unary();
        if (accept('^')) return Expression::binary(Op::Pow, base, factor());
        return base;
    }

    Expression unary() {
        skip_space();
        if (std::size_t m = minus_at()) {
            pos_ += m;
            return Expression::unary(Op::Neg, unary());
        }
        return atom();
    }

    Expression atom() {
        skip_space();
        if (pos_ >= src_.size()) fail("expected a number, 'x', a function or '('");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            Expression inner = expr();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if ((c >= '0' && c <= '9') || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        fail("expected a number, 'x', a function or '('");
    }

    Expression number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t nd = digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            nd += digits();
        }
        if (nd == 0) {
            pos_ = start;
            fail("malformed number");
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            const std::size_t mark = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (digits() == 0) {
                pos_ = mark;
                fail("malformed exponent");
            }
        }
        double value = 0.0;
        const auto res = std::from_chars(src_.data() + start, src_.data() + pos_, value);
        if (res.ec != std::errc() || !std::isfinite(value)) {
            throw ParseError("number out of range", start);
        }
        return Expression::constant(value);
    }

    Expression identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        const std::string_view name = src_.substr(start, pos_ - start);
        if (name == "x") return Expression::variable();
        static constexpr std::pair<std::string_view, Op> functions[] = {
            {"sin", Op::Sin}, {"cos", Op::Cos},   {"exp", Op::Exp},
            {"log", Op::Log}, {"sqrt", Op::Sqrt}, {"tanh", Op::Tanh},
        };
        for (const auto& [fname, op] : functions) {
            if (name == fname) {
                if (!accept('(')) fail("expected '(' after '" + std::string(name) + "'");
                Expression arg = expr();
                if (!accept(')')) fail("expected ')'");
                return Expression::unary(op, arg);
            }
        }
        throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Folding constructors used by differentiate().

bool is_literal(const Expression& e, double v) { return e.op() == Op::Constant && e.literal() == v; }

Expression fold_or(Expression e) {
    if (e.op() != Op::Constant && e.is_constant()) {
        try {
            return Expression::constant(e(0.0));
        } catch (const DomainError&) {
        }
    }
    return e;
}

Expression add(const Expression& a, const Expression& b) {
    if (is_literal(a, 0.0)) return b;
    if (is_literal(b, 0.0)) return a;
    return fold_or(Expression::binary(Op::Add, a, b));
}

Expression sub(const Expression& a, const Expression& b) {
    if (is_literal(b, 0.0)) return a;
    if (is_literal(a, 0.0)) return fold_or(Expression::unary(Op::Neg, b));
    return fold_or(Expression::binary(Op::Sub, a, b));
}

Expression mul(const Expression& a, const Expression& b) {
    if (is_literal(a, 0.0) || is_literal(b, 0.0)) return Expression::constant(0.0);
    if (is_literal(a, 1.0)) return b;
    if (is_literal(b, 1.0)) return a;
    return fold_or(Expression::binary(Op::Mul, a, b));
}

Expression div(const Expression& a, const Expression& b) {
    if (is_literal(a, 0.0)) return Expression::constant(0.0);
    if (is_literal(b, 1.0)) return a;
    return fold_or(Expression::binary(Op::Div, a, b));
}

Expression neg(const Expression& a) {
    if (a.op() == Op::Neg) return a.lhs();
    return fold_or(Expression::unary(Op::Neg, a));
}

Expression pow_expr(const Expression& a, const Expression& b) {
    if (is_literal(b, 1.0)) return a;
    if (is_literal(b, 0.0)) return Expression::constant(1.0);
    return fold_or(Expression::binary(Op::Pow, a, b));
}

Expression fn(Op op, const Expression& a) { return fold_or(Expression::unary(op, a)); }

void print_node(const Expression& e, std::string& out) {
    switch (e.op()) {
        case Op::Constant: {
            char buf[40];
            const double v = e.literal();
            std::snprintf(buf, sizeof buf, "%.17g", std::fabs(v));
            if (std::signbit(v)) {
                out += "(-";
                out += buf;
                out += ")";
            } else {
                out += buf;
            }
            return;
        }
        case Op::Variable: out += "x"; return;
        case Op::Neg:
            out += "(-";
            print_node(e.lhs(), out);
            out += ")";
            return;
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::Div:
        case Op::Pow: {
            static constexpr char symbols[] = {'+', '-', '*', '/', '^'};
            const int idx = static_cast<int>(e.op()) - static_cast<int>(Op::Add);
            out += "(";
            print_node(e.lhs(), out);
            out += ' ';
            out += symbols[idx];
            out += ' ';
            print_node(e.rhs(), out);
            out += ")";
            return;
        }
        default:
            out += function_name(e.op());
            out += "(";
            print_node(e.lhs(), out);
            out += ")";
            return;
    }
}

}  // namespace

Expression::Expression() : node_(std::make_shared<Node>()) {}

Expression::Expression(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expression Expression::constant(double value) {
    auto n = std::make_shared<Node>();
    n->op = Op::Constant;
    n->value = value;
    return Expression(std::move(n));
}

Expression Expression::variable() {
    auto n = std::make_shared<Node>();
    n->op = Op::Variable;
    n->constant = false;
    return Expression(std::move(n));
}

Expression Expression::unary(Op op, Expression arg) {
    if (!is_unary(op)) throw PreconditionError("operator is not unary");
    auto n = std::make_shared<Node>();
    n->op = op;
    n->constant = arg.node_->constant;
    n->count = 1 + arg.node_->count;
    n->a = std::move(arg.node_);
    return Expression(std::move(n));
}

Expression Expression::binary(Op op, Expression lhs, Expression rhs) {
    if (op != Op::Add && op != Op::Sub && op != Op::Mul && op != Op::Div && op != Op::Pow) {
        throw PreconditionError("operator is not binary");
    }
    auto n = std::make_shared<Node>();
    n->op = op;
    n->constant = lhs.node_->constant && rhs.node_->constant;
    n->count = 1 + lhs.node_->count + rhs.node_->count;
    n->a = std::move(lhs.node_);
    n->b = std::move(rhs.node_);
    return Expression(std::move(n));
}

Op Expression::op() const noexcept { return node_->op; }
double Expression::literal() const noexcept { return node_->value; }

Expression Expression::lhs() const {
    if (!node_->a) throw PreconditionError("leaf expression has no operand");
    return Expression(node_->a);
}

Expression Expression::rhs() const {
    if (!node_->b) throw PreconditionError("expression has no right operand");
    return Expression(node_->b);
}

bool Expression::is_constant() const noexcept { return node_->constant; }
std::size_t Expression::node_count() const noexcept { return node_->count; }

double Expression::operator()(double x) const { return eval_node(*node_, x); }

std::vector<double> Expression::taylor(double x, int order) const {
    if (order < 0) throw PreconditionError("negative Taylor order");
    Series s = series_node(*node_, x, static_cast<std::size_t>(order) + 1);
    for (double v : s) checked(v, "Taylor expansion");
    return s;
}

bool operator==(const Expression& a, const Expression& b) { return same_tree(a.node_.get(), b.node_.get()); }

Expression parse(std::string_view source) { return Parser(source).run(); }

double evaluate(const Expression& e, double x) {
    if (!std::isfinite(x)) throw PreconditionError("evaluation point must be finite");
    return e(x);
}

Expression differentiate(const Expression& e) {
    if (e.is_constant()) return Expression::constant(0.0);
    switch (e.op()) {
        case Op::Constant: return Expression::constant(0.0);
        case Op::Variable: return Expression::constant(1.0);
        case Op::Add: return add(differentiate(e.lhs()), differentiate(e.rhs()));
        case Op::Sub: return sub(differentiate(e.lhs()), differentiate(e.rhs()));
        case Op::Mul: {
            const Expression u = e.lhs();
            const Expression v = e.rhs();
            return add(mul(differentiate(u), v), mul(u, differentiate(v)));
        }
        case Op::Div: {
            const Expression u = e.lhs();
            const Expression v = e.rhs();
            return div(sub(mul(differentiate(u), v), mul(u, differentiate(v))), mul(v, v));
        }
        case Op::Pow: {
            const Expression u = e.lhs();
            const Expression v = e.rhs();
            if (v.is_constant()) {
                const Expression reduced = fold_or(sub(v, Expression::constant(1.0)));
                return mul(mul(v, pow_expr(u, reduced)), differentiate(u));
            }
            // d(u^v) = u^v (v' log u + v u'/u)
            return mul(e, add(mul(differentiate(v), fn(Op::Log, u)), div(mul(v, differentiate(u)), u)));
        }
        case Op::Neg: return neg(differentiate(e.lhs()));
        case Op::Sin: return mul(fn(Op::Cos, e.lhs()), differentiate(e.lhs()));
        case Op::Cos: return neg(mul(fn(Op::Sin, e.lhs()), differentiate(e.lhs())));
        case Op::Exp: return mul(e, differentiate(e.lhs()));
        case Op::Log: return div(differentiate(e.lhs()), e.lhs());
        case Op::Sqrt: return div(differentiate(e.lhs()), mul(Expression::constant(2.0), e));
        case Op::Tanh: {
            const Expression t2 = mul(e, e);
            return mul(sub(Expression::constant(1.0), t2), differentiate(e.lhs()));
        }
    }
    return Expression::constant(0.0);
}

std::string print(const Expression& e) {
    std::string out;
    print_node(e, out);
    return out;
}

}  // namespace sturm
