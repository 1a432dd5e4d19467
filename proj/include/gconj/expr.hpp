#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "gconj/errors.hpp"
#include "gconj/extended_value.hpp"

namespace gconj {

/// Built-in function vocabulary. abs/exp/log/sqrt are unary; the rest accept
/// one or more arguments.
enum class ExprFunc { abs, exp, log, sqrt, min, max, norm1, norm2, norminf };

namespace detail {

inline const char* func_name(ExprFunc f) {
    switch (f) {
        case ExprFunc::abs: return "abs";
        case ExprFunc::exp: return "exp";
        case ExprFunc::log: return "log";
        case ExprFunc::sqrt: return "sqrt";
        case ExprFunc::min: return "min";
        case ExprFunc::max: return "max";
        case ExprFunc::norm1: return "norm1";
        case ExprFunc::norm2: return "norm2";
        case ExprFunc::norminf: return "norminf";
    }
    return "?";
}

inline bool func_is_unary(ExprFunc f) {
    return f == ExprFunc::abs || f == ExprFunc::exp || f == ExprFunc::log ||
           f == ExprFunc::sqrt;
}

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    enum class Kind { constant, variable, negate, add, sub, mul, div, pow, call };

    Kind kind;
    double number = 0.0;        // constant
    char block = 'x';           // variable: one of x, y, u, w
    std::size_t index = 0;      // variable: 1-based
    ExprFunc func = ExprFunc::abs;  // call
    std::vector<ExprPtr> args;
};

}  // namespace detail

/// Variable bindings for evaluation, one span per variable block. x1 reads
/// x[0] and so on; referencing past the span is an eval_error.
struct Bindings {
    std::span<const double> x{};
    std::span<const double> y{};
    std::span<const double> u{};
    std::span<const double> w{};

    std::span<const double> block(char b) const {
        switch (b) {
            case 'x': return x;
            case 'y': return y;
            case 'u': return u;
            default: return w;
        }
    }
};

/// Immutable arithmetic expression over variable blocks x, y, u, w.
///
/// Grammar (loosest to tightest): addition and subtraction, then
/// multiplication and division, then unary minus, then right-associative
/// '^', then atoms. So "-x1^2" is -(x1^2) and "x1^2^3" is x1^(2^3).
class Expression {
public:
    static Expression parse(std::string_view text);

    static Expression constant(double v) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("expression constants must be finite");
        }
        auto n = std::make_shared<detail::ExprNode>();
        n->kind = detail::ExprNode::Kind::constant;
        n->number = v;
        return Expression(std::move(n));
    }

    static Expression variable(char block, std::size_t index) {
        if (block != 'x' && block != 'y' && block != 'u' && block != 'w') {
            throw std::invalid_argument("variable block must be x, y, u or w");
        }
        if (index == 0) {
            throw std::invalid_argument("variable index is 1-based");
        }
        auto n = std::make_shared<detail::ExprNode>();
        n->kind = detail::ExprNode::Kind::variable;
        n->block = block;
        n->index = index;
        return Expression(std::move(n));
    }

    static Expression negate(Expression e) { return unary(detail::ExprNode::Kind::negate, std::move(e)); }
    static Expression add(Expression a, Expression b) { return binary(detail::ExprNode::Kind::add, std::move(a), std::move(b)); }
    static Expression sub(Expression a, Expression b) { return binary(detail::ExprNode::Kind::sub, std::move(a), std::move(b)); }
    static Expression mul(Expression a, Expression b) { return binary(detail::ExprNode::Kind::mul, std::move(a), std::move(b)); }
    static Expression div(Expression a, Expression b) { return binary(detail::ExprNode::Kind::div, std::move(a), std::move(b)); }
    static Expression pow(Expression a, Expression b) { return binary(detail::ExprNode::Kind::pow, std::move(a), std::move(b)); }

    static Expression call(ExprFunc f, std::vector<Expression> args) {
        if (args.empty()) {
            throw std::invalid_argument("function call needs at least one argument");
        }
        if (detail::func_is_unary(f) && args.size() != 1) {
            throw std::invalid_argument(std::string("function '") +
                                        detail::func_name(f) +
                                        "' takes exactly one argument");
        }
        auto n = std::make_shared<detail::ExprNode>();
        n->kind = detail::ExprNode::Kind::call;
        n->func = f;
        for (auto& a : args) n->args.push_back(a.root_);
        return Expression(std::move(n));
    }

    /// Canonical text form; parses back to an equal expression.
    std::string to_string() const {
        std::string out;
        print(*root_, out);
        return out;
    }

    /// Structural equality; constants compare bitwise.
    friend bool operator==(const Expression& a, const Expression& b) {
        return equal(*a.root_, *b.root_);
    }

    /// Highest 1-based index used from one block, 0 if the block is unused.
    std::size_t max_index(char block) const {
        std::size_t best = 0;
        scan_max(*root_, block, best);
        return best;
    }

    ExtendedValue evaluate(const Bindings& b) const {
        double v = eval(*root_, b);
        return std::isfinite(v) ? ExtendedValue::finite(v)
                                : ExtendedValue::infinity();
    }

private:
    explicit Expression(detail::ExprPtr root) : root_(std::move(root)) {}

    static Expression unary(detail::ExprNode::Kind k, Expression e) {
        auto n = std::make_shared<detail::ExprNode>();
        n->kind = k;
        n->args.push_back(e.root_);
        return Expression(std::move(n));
    }

    static Expression binary(detail::ExprNode::Kind k, Expression a, Expression b) {
        auto n = std::make_shared<detail::ExprNode>();
        n->kind = k;
        n->args.push_back(a.root_);
        n->args.push_back(b.root_);
        return Expression(std::move(n));
    }

    // precedence tiers: 0 add/sub, 1 mul/div, 2 unary minus, 3 pow, 4 atom
    static int precedence(const detail::ExprNode& n) {
        using K = detail::ExprNode::Kind;
        switch (n.kind) {
            case K::add:
            case K::sub: return 0;
            case K::mul:
            case K::div: return 1;
            case K::negate: return 2;
            case K::pow: return 3;
            default: return 4;
        }
    }

    static void print_wrapped(const detail::ExprNode& n, int min_prec, std::string& out) {
        if (precedence(n) < min_prec) {
            out += '(';
            print(n, out);
            out += ')';
        } else {
            print(n, out);
        }
    }

    static void print(const detail::ExprNode& n, std::string& out) {
        using K = detail::ExprNode::Kind;
        switch (n.kind) {
            case K::constant: {
                char buf[32];
                auto res = std::to_chars(buf, buf + sizeof buf, n.number);
                out.append(buf, res.ptr);
                return;
            }
            case K::variable:
                out += n.block;
                out += std::to_string(n.index);
                return;
            case K::negate:
                out += '-';
                print_wrapped(*n.args[0], 2, out);
                return;
            case K::add:
            case K::sub:
                print_wrapped(*n.args[0], 0, out);
                out += (n.kind == K::add) ? " + " : " - ";
                print_wrapped(*n.args[1], 1, out);
                return;
            case K::mul:
            case K::div:
                print_wrapped(*n.args[0], 1, out);
                out += (n.kind == K::mul) ? "*" : "/";
                print_wrapped(*n.args[1], 2, out);
                return;
            case K::pow:
                print_wrapped(*n.args[0], 4, out);
                out += '^';
                print_wrapped(*n.args[1], 2, out);
                return;
            case K::call: {
                out += detail::func_name(n.func);
                out += '(';
                for (std::size_t i = 0; i < n.args.size(); ++i) {
                    if (i) out += ", ";
                    print(*n.args[i], out);
                }
                out += ')';
                return;
            }
        }
    }

    static bool equal(const detail::ExprNode& a, const detail::ExprNode& b) {
        using K = detail::ExprNode::Kind;
        if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
        switch (a.kind) {
            case K::constant:
                if (a.number != b.number) return false;
                break;
            case K::variable:
                if (a.block != b.block || a.index != b.index) return false;
                break;
            case K::call:
                if (a.func != b.func) return false;
                break;
            default:
                break;
        }
        for (std::size_t i = 0; i < a.args.size(); ++i) {
            if (!equal(*a.args[i], *b.args[i])) return false;
        }
        return true;
    }

    static void scan_max(const detail::ExprNode& n, char block, std::size_t& best) {
        if (n.kind == detail::ExprNode::Kind::variable && n.block == block) {
            if (n.index > best) best = n.index;
        }
        for (const auto& a : n.args) scan_max(*a, block, best);
    }

    // Evaluation works on raw doubles; +inf may flow through as an overflow
    // value, while NaN and -inf are rejected where they first appear.
    static double checked(double v, const char* what) {
        if (std::isnan(v) || v == -std::numeric_limits<double>::infinity()) {
            throw eval_error(std::string(what) + " produced an invalid value");
        }
        return v;
    }

    static double eval(const detail::ExprNode& n, const Bindings& b) {
        using K = detail::ExprNode::Kind;
        switch (n.kind) {
            case K::constant: return n.number;
            case K::variable: {
                auto span = b.block(n.block);
                if (n.index > span.size()) {
                    throw eval_error(std::string("variable '") + n.block +
                                     std::to_string(n.index) + "' is not bound");
                }
                return span[n.index - 1];
            }
            case K::negate: return checked(-eval(*n.args[0], b), "negation");
            case K::add: return checked(eval(*n.args[0], b) + eval(*n.args[1], b), "addition");
            case K::sub: return checked(eval(*n.args[0], b) - eval(*n.args[1], b), "subtraction");
            case K::mul: return checked(eval(*n.args[0], b) * eval(*n.args[1], b), "multiplication");
            case K::div: {
                double num = eval(*n.args[0], b);
                double den = eval(*n.args[1], b);
                if (den == 0.0) throw eval_error("division by zero");
                return checked(num / den, "division");
            }
            case K::pow: {
                double base = eval(*n.args[0], b);
                double ex = eval(*n.args[1], b);
                return checked(std::pow(base, ex), "pow");
            }
            case K::call: return eval_call(n, b);
        }
        throw eval_error("corrupt expression node");
    }

    static double eval_call(const detail::ExprNode& n, const Bindings& b) {
        std::vector<double> args;
        args.reserve(n.args.size());
        for (const auto& a : n.args) args.push_back(eval(*a, b));
        switch (n.func) {
            case ExprFunc::abs: return std::fabs(args[0]);
            case ExprFunc::exp: return std::exp(args[0]);
            case ExprFunc::log:
                if (args[0] <= 0.0) throw eval_error("log of a non-positive value");
                return std::log(args[0]);
            case ExprFunc::sqrt:
                if (args[0] < 0.0) throw eval_error("sqrt of a negative value");
                return std::sqrt(args[0]);
            case ExprFunc::min: {
                double v = args[0];
                for (double a : args) v = std::min(v, a);
                return v;
            }
            case ExprFunc::max: {
                double v = args[0];
                for (double a : args) v = std::max(v, a);
                return v;
            }
            case ExprFunc::norm1: {
                double s = 0.0;
                for (double a : args) s += std::fabs(a);
                return checked(s, "norm1");
            }
            case ExprFunc::norm2: {
                double s = 0.0;
                for (double a : args) s += a * a;
                return checked(std::sqrt(s), "norm2");
            }
            case ExprFunc::norminf: {
                double v = 0.0;
                for (double a : args) v = std::max(v, std::fabs(a));
                return v;
            }
        }
        throw eval_error("corrupt function node");
    }

    detail::ExprPtr root_;

    friend class ExprParser;
};

/// Recursive-descent parser for the expression grammar. Kept as a class so
/// the token cursor and source text travel together.
class ExprParser {
public:
    explicit ExprParser(std::string_view text) : text_(text) { tokenize(); }

    Expression run() {
        detail::ExprPtr e = parse_expr();
        if (tokens_[pos_].kind != TokKind::end) {
            fail("unexpected trailing input", tokens_[pos_].offset);
        }
        return Expression(std::move(e));
    }

private:
    enum class TokKind { number, ident, plus, minus, star, slash, caret, lparen, rparen, comma, end };

    struct Token {
        TokKind kind;
        std::size_t offset;
        std::string_view text;
        double value = 0.0;
    };

    [[noreturn]] void fail(const std::string& msg, std::size_t offset) const {
        throw parse_error(msg, offset);
    }

    void tokenize() {
        std::size_t i = 0;
        const std::size_t n = text_.size();
        while (i < n) {
            char c = text_[i];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                ++i;
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c))) {
                std::size_t start = i;
                while (i < n && std::isdigit(static_cast<unsigned char>(text_[i]))) ++i;
                if (i < n && text_[i] == '.') {
                    ++i;
                    if (i >= n || !std::isdigit(static_cast<unsigned char>(text_[i]))) {
                        fail("digits required after decimal point", i);
                    }
                    while (i < n && std::isdigit(static_cast<unsigned char>(text_[i]))) ++i;
                }
                if (i < n && (text_[i] == 'e' || text_[i] == 'E')) {
                    std::size_t mark = i;
                    ++i;
                    if (i < n && (text_[i] == '+' || text_[i] == '-')) ++i;
                    if (i >= n || !std::isdigit(static_cast<unsigned char>(text_[i]))) {
                        i = mark;  // "2e" is the number 2 followed by ident "e"
                    } else {
                        while (i < n && std::isdigit(static_cast<unsigned char>(text_[i]))) ++i;
                    }
                }
                std::string_view lexeme = text_.substr(start, i - start);
                double value = 0.0;
                auto res = std::from_chars(lexeme.data(), lexeme.data() + lexeme.size(), value);
                if (res.ec != std::errc{} || res.ptr != lexeme.data() + lexeme.size()) {
                    fail("malformed number", start);
                }
                tokens_.push_back({TokKind::number, start, lexeme, value});
                continue;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t start = i;
                while (i < n && (std::isalnum(static_cast<unsigned char>(text_[i])) || text_[i] == '_')) ++i;
                tokens_.push_back({TokKind::ident, start, text_.substr(start, i - start)});
                continue;
            }
            TokKind k;
            switch (c) {
                case '+': k = TokKind::plus; break;
                case '-': k = TokKind::minus; break;
                case '*': k = TokKind::star; break;
                case '/': k = TokKind::slash; break;
                case '^': k = TokKind::caret; break;
                case '(': k = TokKind::lparen; break;
                case ')': k = TokKind::rparen; break;
                case ',': k = TokKind::comma; break;
                default:
                    fail(std::string("unexpected character '") + c + "'", i);
            }
            tokens_.push_back({k, i, text_.substr(i, 1)});
            ++i;
        }
        tokens_.push_back({TokKind::end, n, {}});
    }

    const Token& peek() const { return tokens_[pos_]; }

    bool accept(TokKind k) {
        if (tokens_[pos_].kind == k) {
            ++pos_;
            return true;
        }
        return false;
    }

    detail::ExprPtr make(detail::ExprNode&& n) {
        return std::make_shared<detail::ExprNode>(std::move(n));
    }

    detail::ExprPtr parse_expr() {
        detail::ExprPtr left = parse_term();
        for (;;) {
            bool plus = peek().kind == TokKind::plus;
            if (!plus && peek().kind != TokKind::minus) return left;
            ++pos_;
            detail::ExprNode n;
            n.kind = plus ? detail::ExprNode::Kind::add : detail::ExprNode::Kind::sub;
            n.args = {std::move(left), parse_term()};
            left = make(std::move(n));
        }
    }

    detail::ExprPtr parse_term() {
        detail::ExprPtr left = parse_factor();
        for (;;) {
            bool star = peek().kind == TokKind::star;
            if (!star && peek().kind != TokKind::slash) return left;
            ++pos_;
            detail::ExprNode n;
            n.kind = star ? detail::ExprNode::Kind::mul : detail::ExprNode::Kind::div;
            n.args = {std::move(left), parse_factor()};
            left = make(std::move(n));
        }
    }

    detail::ExprPtr parse_factor() {
        if (accept(TokKind::minus)) {
            detail::ExprNode n;
            n.kind = detail::ExprNode::Kind::negate;
            n.args = {parse_factor()};
            return make(std::move(n));
        }
        return parse_power();
    }

    detail::ExprPtr parse_power() {
        detail::ExprPtr base = parse_atom();
        if (!accept(TokKind::caret)) return base;
        detail::ExprNode n;
        n.kind = detail::ExprNode::Kind::pow;
        n.args = {std::move(base), parse_factor()};  // right-assoc, allows x^-2
        return make(std::move(n));
    }

    detail::ExprPtr parse_atom() {
        const Token& t = peek();
        if (t.kind == TokKind::number) {
            ++pos_;
            detail::ExprNode n;
            n.kind = detail::ExprNode::Kind::constant;
            n.number = t.value;
            return make(std::move(n));
        }
        if (t.kind == TokKind::lparen) {
            ++pos_;
            detail::ExprPtr inner = parse_expr();
            if (!accept(TokKind::rparen)) {
                fail("expected ')'", peek().offset);
            }
            return inner;
        }
        if (t.kind == TokKind::ident) {
            ++pos_;
            if (peek().kind == TokKind::lparen) return parse_call(t);
            return parse_variable(t);
        }
        fail("expected a number, variable, function or '('", t.offset);
    }

    detail::ExprPtr parse_call(const Token& name) {
        static const std::pair<std::string_view, ExprFunc> table[] = {
            {"abs", ExprFunc::abs},       {"exp", ExprFunc::exp},
            {"log", ExprFunc::log},       {"sqrt", ExprFunc::sqrt},
            {"min", ExprFunc::min},       {"max", ExprFunc::max},
            {"norm1", ExprFunc::norm1},   {"norm2", ExprFunc::norm2},
            {"norminf", ExprFunc::norminf},
        };
        const ExprFunc* func = nullptr;
        for (const auto& [nm, f] : table) {
            if (nm == name.text) {
                func = &f;
                break;
            }
        }
        if (!func) {
            fail("unknown function '" + std::string(name.text) + "'", name.offset);
        }
        ++pos_;  // consume '('
        detail::ExprNode n;
        n.kind = detail::ExprNode::Kind::call;
        n.func = *func;
        n.args.push_back(parse_expr());
        while (accept(TokKind::comma)) n.args.push_back(parse_expr());
        if (!accept(TokKind::rparen)) {
            fail("expected ')' or ',' in argument list", peek().offset);
        }
        if (detail::func_is_unary(*func) && n.args.size() != 1) {
            fail("function '" + std::string(name.text) + "' takes exactly one argument",
                 name.offset);
        }
        return make(std::move(n));
    }

    detail::ExprPtr parse_variable(const Token& t) {
        std::string_view s = t.text;
        bool ok = s.size() >= 2 &&
                  (s[0] == 'x' || s[0] == 'y' || s[0] == 'u' || s[0] == 'w') &&
                  s[1] >= '1' && s[1] <= '9';
        for (std::size_t i = 2; ok && i < s.size(); ++i) {
            ok = s[i] >= '0' && s[i] <= '9';
        }
        if (!ok) {
            fail("invalid variable name '" + std::string(s) +
                     "' (expected x<k>, y<k>, u<k> or w<k> with k >= 1)",
                 t.offset);
        }
        std::size_t index = 0;
        auto res = std::from_chars(s.data() + 1, s.data() + s.size(), index);
        if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || index == 0) {
            fail("variable index out of range", t.offset);
        }
        detail::ExprNode n;
        n.kind = detail::ExprNode::Kind::variable;
        n.block = s[0];
        n.index = index;
        return make(std::move(n));
    }

    std::string_view text_;
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

inline Expression Expression::parse(std::string_view text) {
    return ExprParser(text).run();
}

/// Free-function spellings used throughout the library.
inline Expression parse_expression(std::string_view text) {
    return Expression::parse(text);
}

inline ExtendedValue evaluate(const Expression& e, const Bindings& b) {
    return e.evaluate(b);
}

}  // namespace gconj
