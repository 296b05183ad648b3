#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "riemap/dual2.hpp"
#include "riemap/errors.hpp"

namespace riemap {

/// Small arithmetic expression language over variables x1..xN:
///   constants, pi, + - * / unary-, ^integer, sin cos exp sqrt log.
/// Precedence ^ > unary- > */ > +-, with * / + - left-associative and
/// ^ right-associative. Exponents must be integer literals. Parsed trees
/// evaluate over plain doubles or Dual2 and round-trip through print().
class Expr {
public:
    enum class Kind : std::uint8_t { constant, variable, add, sub, mul, div, neg, pow, call };
    enum class Func : std::uint8_t { sin, cos, exp, sqrt, log };

    struct Node {
        Kind kind;
        double value = 0.0;      // constant
        int var = -1;            // variable (0-based)
        long long ipow = 0;      // pow
        Func fn = Func::sin;     // call
        int a = -1, b = -1;      // children
        std::uint32_t offset = 0;  // byte offset in source, for diagnostics
    };

    Expr() = default;

    /// Parse `source` as an expression of arity variables.
    static Expr parse(std::string_view source, int arity);

    int arity() const { return arity_; }
    bool empty() const { return nodes_.empty(); }

    /// True when the expression references no variables.
    bool is_constant() const {
        for (const Node& n : nodes_)
            if (n.kind == Kind::variable) return false;
        return true;
    }

    /// Evaluate over any scalar supporting the arithmetic set (double, Dual2).
    template <class S>
    S evaluate(const std::vector<S>& args) const {
        if (static_cast<int>(args.size()) != arity_)
            throw EvalError("expected " + std::to_string(arity_) + " arguments, got " +
                            std::to_string(args.size()));
        return eval_node<S>(root_, args);
    }

    double operator()(const std::vector<double>& args) const { return evaluate(args); }

    /// Canonical text form; parse(print(e)) reproduces e exactly.
    std::string print() const { return print_node(root_, 0); }

    friend bool operator==(const Expr& a, const Expr& b) {
        return a.arity_ == b.arity_ && a.equal_nodes(a.root_, b, b.root_);
    }

    /// Build-from-parts helpers used by the registries and compose().
    static Expr constant(double v, int arity);
    static Expr variable(int index, int arity);

    /// Replace every variable x_i by replacement[i] (arity of the result is
    /// the common arity of the replacements). Used for map composition.
    Expr substitute(const std::vector<Expr>& replacements) const;

private:
    std::vector<Node> nodes_;
    int root_ = -1;
    int arity_ = 0;

    int add_node(Node n) {
        nodes_.push_back(n);
        return static_cast<int>(nodes_.size()) - 1;
    }

    static double value_of(double x) { return x; }
    static double value_of(const Dual2& x) { return x.value; }

    template <class S>
    S eval_node(int idx, const std::vector<S>& args) const {
        const Node& n = nodes_[static_cast<std::size_t>(idx)];
        switch (n.kind) {
            case Kind::constant: return S(n.value);
            case Kind::variable: return args[static_cast<std::size_t>(n.var)];
            case Kind::add: return eval_node<S>(n.a, args) + eval_node<S>(n.b, args);
            case Kind::sub: return eval_node<S>(n.a, args) - eval_node<S>(n.b, args);
            case Kind::mul: return eval_node<S>(n.a, args) * eval_node<S>(n.b, args);
            case Kind::div: {
                S num = eval_node<S>(n.a, args);
                S den = eval_node<S>(n.b, args);
                if (value_of(den) == 0.0) fail(n, "division by zero");
                return guarded(n, [&] { return num / den; });
            }
            case Kind::neg: return -eval_node<S>(n.a, args);
            case Kind::pow: {
                S base = eval_node<S>(n.a, args);
                if (n.ipow < 0 && value_of(base) == 0.0)
                    fail(n, "zero raised to a negative power");
                return guarded(n, [&] { return pow_int(base, n.ipow); });
            }
            case Kind::call: {
                S arg = eval_node<S>(n.a, args);
                if (n.fn == Func::sqrt && value_of(arg) < 0.0) fail(n, "sqrt of negative value");
                if (n.fn == Func::log && value_of(arg) <= 0.0) fail(n, "log of non-positive value");
                return guarded(n, [&]() -> S {
                    using std::sin; using std::cos; using std::exp;
                    using std::sqrt; using std::log;
                    switch (n.fn) {
                        case Func::sin: return sin(arg);
                        case Func::cos: return cos(arg);
                        case Func::exp: return exp(arg);
                        case Func::sqrt: return sqrt(arg);
                        case Func::log: return log(arg);
                    }
                    throw EvalError("unreachable");
                });
            }
        }
        throw EvalError("unreachable");
    }

    [[noreturn]] void fail(const Node& n, const std::string& what) const {
        throw EvalError(what + " at offset " + std::to_string(n.offset) + " in '" + print() + "'");
    }

    template <class Op>
    auto guarded(const Node& n, Op&& op) const -> decltype(op()) {
        try {
            return op();
        } catch (const DomainError& e) {
            fail(n, e.what());
        }
    }

    bool equal_nodes(int ia, const Expr& other, int ib) const {
        const Node& x = nodes_[static_cast<std::size_t>(ia)];
        const Node& y = other.nodes_[static_cast<std::size_t>(ib)];
        if (x.kind != y.kind) return false;
        switch (x.kind) {
            case Kind::constant: return x.value == y.value;
            case Kind::variable: return x.var == y.var;
            case Kind::neg: return equal_nodes(x.a, other, y.a);
            case Kind::pow: return x.ipow == y.ipow && equal_nodes(x.a, other, y.a);
            case Kind::call: return x.fn == y.fn && equal_nodes(x.a, other, y.a);
            default: return equal_nodes(x.a, other, y.a) && equal_nodes(x.b, other, y.b);
        }
    }

    // Precedence levels for printing: add 1, mul 2, unary 3, pow 4, atom 5.
    static int precedence(Kind k) {
        switch (k) {
            case Kind::add:
            case Kind::sub: return 1;
            case Kind::mul:
            case Kind::div: return 2;
            case Kind::neg: return 3;
            case Kind::pow: return 4;
            default: return 5;
        }
    }

    static std::string format_double(double v);
    static const char* func_name(Func f) {
        switch (f) {
            case Func::sin: return "sin";
            case Func::cos: return "cos";
            case Func::exp: return "exp";
            case Func::sqrt: return "sqrt";
            case Func::log: return "log";
        }
        return "?";
    }

    std::string print_node(int idx, int parent_prec) const {
        const Node& n = nodes_[static_cast<std::size_t>(idx)];
        // A negative literal prints with a leading '-', so it binds like a
        // unary minus for parenthesization purposes.
        const int own_prec = (n.kind == Kind::constant && std::signbit(n.value))
                                 ? precedence(Kind::neg)
                                 : precedence(n.kind);
        std::string s;
        switch (n.kind) {
            case Kind::constant: s = format_double(n.value); break;
            case Kind::variable: s = "x" + std::to_string(n.var + 1); break;
            case Kind::add: s = print_node(n.a, 1) + " + " + print_node(n.b, 2); break;
            case Kind::sub: s = print_node(n.a, 1) + " - " + print_node(n.b, 2); break;
            case Kind::mul: s = print_node(n.a, 2) + "*" + print_node(n.b, 3); break;
            case Kind::div: s = print_node(n.a, 2) + "/" + print_node(n.b, 3); break;
            case Kind::neg: s = "-" + print_node(n.a, 3); break;
            case Kind::pow: s = print_node(n.a, 5) + "^" + std::to_string(n.ipow); break;
            case Kind::call:
                s = std::string(func_name(n.fn)) + "(" + print_node(n.a, 0) + ")";
                return s;  // self-delimiting
        }
        if (own_prec < parent_prec) s = "(" + s + ")";
        return s;
    }

    friend class ExprParser;
};

namespace detail {

struct Token {
    enum class Type { number, ident, plus, minus, star, slash, caret, lparen, rparen, end };
    Type type;
    double number = 0.0;
    std::string_view text;
    std::size_t offset = 0;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        Token t;
        t.offset = pos_;
        if (pos_ >= src_.size()) {
            t.type = Token::Type::end;
            return t;
        }
        const char c = src_[pos_];
        switch (c) {
            case '+': t.type = Token::Type::plus; ++pos_; return t;
            case '-': t.type = Token::Type::minus; ++pos_; return t;
            case '*': t.type = Token::Type::star; ++pos_; return t;
            case '/': t.type = Token::Type::slash; ++pos_; return t;
            case '^': t.type = Token::Type::caret; ++pos_; return t;
            case '(': t.type = Token::Type::lparen; ++pos_; return t;
            case ')': t.type = Token::Type::rparen; ++pos_; return t;
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = src_.data() + pos_;
            const char* end = src_.data() + src_.size();
            double value = 0.0;
            auto [ptr, ec] = std::from_chars(begin, end, value);
            if (ec != std::errc())
                throw ParseError("malformed number", pos_);
            t.type = Token::Type::number;
            t.number = value;
            t.text = std::string_view(begin, static_cast<std::size_t>(ptr - begin));
            pos_ += t.text.size();
            return t;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
            t.type = Token::Type::ident;
            t.text = src_.substr(start, pos_ - start);
            return t;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;
};

}  // namespace detail

class ExprParser {
public:
    ExprParser(std::string_view src, int arity) : lexer_(src), arity_(arity) {
        expr_.arity_ = arity;
        advance();
    }

    Expr run() {
        expr_.root_ = parse_sum();
        if (tok_.type != detail::Token::Type::end)
            throw ParseError("unexpected trailing input", tok_.offset);
        return std::move(expr_);
    }

private:
    detail::Lexer lexer_;
    detail::Token tok_;
    Expr expr_;
    int arity_;

    void advance() { tok_ = lexer_.next(); }

    bool accept(detail::Token::Type t) {
        if (tok_.type != t) return false;
        advance();
        return true;
    }

    int parse_sum() {
        int lhs = parse_product();
        for (;;) {
            const std::size_t off = tok_.offset;
            if (accept(detail::Token::Type::plus))
                lhs = node(Expr::Kind::add, lhs, parse_product(), off);
            else if (accept(detail::Token::Type::minus))
                lhs = node(Expr::Kind::sub, lhs, parse_product(), off);
            else
                return lhs;
        }
    }

    int parse_product() {
        int lhs = parse_unary();
        for (;;) {
            const std::size_t off = tok_.offset;
            if (accept(detail::Token::Type::star))
                lhs = node(Expr::Kind::mul, lhs, parse_unary(), off);
            else if (accept(detail::Token::Type::slash))
                lhs = node(Expr::Kind::div, lhs, parse_unary(), off);
            else
                return lhs;
        }
    }

    int parse_unary() {
        const std::size_t off = tok_.offset;
        if (accept(detail::Token::Type::minus)) {
            const int inner = parse_unary();
            // Fold a negated literal into the constant so printed negative
            // constants reparse to the same tree.
            Expr::Node& child = expr_.nodes_[static_cast<std::size_t>(inner)];
            if (child.kind == Expr::Kind::constant) {
                child.value = -child.value;
                return inner;
            }
            Expr::Node n;
            n.kind = Expr::Kind::neg;
            n.a = inner;
            n.offset = static_cast<std::uint32_t>(off);
            return expr_.add_node(n);
        }
        return parse_power();
    }

    int parse_power() {
        int base = parse_atom();
        if (tok_.type != detail::Token::Type::caret) return base;
        const std::size_t off = tok_.offset;
        advance();
        Expr::Node n;
        n.kind = Expr::Kind::pow;
        n.a = base;
        n.ipow = parse_exponent();
        n.offset = static_cast<std::uint32_t>(off);
        return expr_.add_node(n);
    }

    // Exponents are integer literals; chained '^' folds right-associatively
    // at parse time (2^3^2 is 2^9).
    long long parse_exponent() {
        bool negative = false;
        if (accept(detail::Token::Type::minus)) negative = true;
        if (tok_.type != detail::Token::Type::number)
            throw ParseError("exponent must be an integer literal", tok_.offset);
        const std::string_view text = tok_.text;
        long long value = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc() || ptr != text.data() + text.size())
            throw ParseError("exponent must be an integer literal", tok_.offset);
        advance();
        if (tok_.type == detail::Token::Type::caret) {
            advance();
            const long long inner = parse_exponent();
            if (inner < 0 || inner > 62)
                throw ParseError("chained exponent out of range", tok_.offset);
            long long folded = 1;
            for (long long i = 0; i < inner; ++i) {
                folded *= value;
                if (folded > (1LL << 40) || folded < -(1LL << 40))
                    throw ParseError("chained exponent out of range", tok_.offset);
            }
            value = folded;
        }
        return negative ? -value : value;
    }

    int parse_atom() {
        const std::size_t off = tok_.offset;
        if (tok_.type == detail::Token::Type::number) {
            Expr::Node n;
            n.kind = Expr::Kind::constant;
            n.value = tok_.number;
            n.offset = static_cast<std::uint32_t>(off);
            advance();
            return expr_.add_node(n);
        }
        if (accept(detail::Token::Type::lparen)) {
            int inner = parse_sum();
            if (!accept(detail::Token::Type::rparen))
                throw ParseError("expected ')'", tok_.offset);
            return inner;
        }
        if (tok_.type == detail::Token::Type::ident) {
            const std::string_view name = tok_.text;
            if (name == "pi") {
                advance();
                Expr::Node n;
                n.kind = Expr::Kind::constant;
                n.value = 3.14159265358979323846;
                n.offset = static_cast<std::uint32_t>(off);
                return expr_.add_node(n);
            }
            if (auto fn = function_named(name)) {
                advance();
                if (!accept(detail::Token::Type::lparen))
                    throw ParseError("expected '(' after function name", tok_.offset);
                int arg = parse_sum();
                if (!accept(detail::Token::Type::rparen))
                    throw ParseError("expected ')'", tok_.offset);
                Expr::Node n;
                n.kind = Expr::Kind::call;
                n.fn = *fn;
                n.a = arg;
                n.offset = static_cast<std::uint32_t>(off);
                return expr_.add_node(n);
            }
            if (name.size() >= 2 && name[0] == 'x') {
                int index = 0;
                auto [ptr, ec] =
                    std::from_chars(name.data() + 1, name.data() + name.size(), index);
                if (ec == std::errc() && ptr == name.data() + name.size()) {
                    if (index < 1 || index > arity_)
                        throw ParseError("variable x" + std::to_string(index) +
                                             " exceeds arity " + std::to_string(arity_),
                                         off);
                    Expr::Node n;
                    n.kind = Expr::Kind::variable;
                    n.var = index - 1;
                    n.offset = static_cast<std::uint32_t>(off);
                    advance();
                    return expr_.add_node(n);
                }
            }
            throw ParseError("unknown identifier '" + std::string(name) + "'", off);
        }
        throw ParseError("expected a value", off);
    }

    static std::optional<Expr::Func> function_named(std::string_view name) {
        if (name == "sin") return Expr::Func::sin;
        if (name == "cos") return Expr::Func::cos;
        if (name == "exp") return Expr::Func::exp;
        if (name == "sqrt") return Expr::Func::sqrt;
        if (name == "log") return Expr::Func::log;
        return std::nullopt;
    }

    int node(Expr::Kind kind, int a, int b, std::size_t offset) {
        Expr::Node n;
        n.kind = kind;
        n.a = a;
        n.b = b;
        n.offset = static_cast<std::uint32_t>(offset);
        return expr_.add_node(n);
    }
};

inline Expr Expr::parse(std::string_view source, int arity) {
    if (source.empty()) throw ParseError("empty expression", 0);
    if (arity < 0) throw ParseError("negative arity", 0);
    return ExprParser(source, arity).run();
}

inline Expr Expr::constant(double v, int arity) {
    Expr e;
    e.arity_ = arity;
    Node n;
    n.kind = Kind::constant;
    n.value = v;
    e.root_ = e.add_node(n);
    return e;
}

inline Expr Expr::variable(int index, int arity) {
    Expr e;
    e.arity_ = arity;
    Node n;
    n.kind = Kind::variable;
    n.var = index;
    e.root_ = e.add_node(n);
    return e;
}

inline Expr Expr::substitute(const std::vector<Expr>& replacements) const {
    if (static_cast<int>(replacements.size()) != arity_)
        throw Error("substitute: need one replacement per variable");
    const int new_arity = replacements.empty() ? 0 : replacements.front().arity_;
    for (const Expr& r : replacements)
        if (r.arity_ != new_arity) throw Error("substitute: mixed replacement arities");

    Expr out;
    out.arity_ = new_arity;
    // Recursively copy, grafting replacement trees at variable leaves.
    auto copy = [&](auto&& self, int idx) -> int {
        const Node& n = nodes_[static_cast<std::size_t>(idx)];
        if (n.kind == Kind::variable) {
            const Expr& rep = replacements[static_cast<std::size_t>(n.var)];
            auto graft = [&](auto&& graft_self, int ridx) -> int {
                Node c = rep.nodes_[static_cast<std::size_t>(ridx)];
                if (c.a >= 0) c.a = graft_self(graft_self, c.a);
                if (c.b >= 0) c.b = graft_self(graft_self, c.b);
                return out.add_node(c);
            };
            return graft(graft, rep.root_);
        }
        Node c = n;
        if (c.a >= 0) c.a = self(self, c.a);
        if (c.b >= 0) c.b = self(self, c.b);
        return out.add_node(c);
    };
    out.root_ = copy(copy, root_);
    return out;
}

inline std::string Expr::format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace riemap
