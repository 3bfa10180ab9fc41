#include "hessquot/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <vector>

#include "hessquot/errors.hpp"

namespace hessquot::expr {

enum class NodeKind { Literal, Var, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class Func { Exp, Log, Sin, Cos, Sqrt };

struct Node {
    NodeKind kind = NodeKind::Literal;
    double value = 0.0;
    Variable var;
    Func func = Func::Exp;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Node>;

constexpr std::array<std::pair<std::string_view, Func>, 5> kFunctions{{
    {"exp", Func::Exp},
    {"log", Func::Log},
    {"sin", Func::Sin},
    {"cos", Func::Cos},
    {"sqrt", Func::Sqrt},
}};

std::string_view func_name(Func f) {
    for (const auto& [name, fn] : kFunctions)
        if (fn == f) return name;
    return "?";
}

NodePtr make_literal(double v) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Literal;
    n->value = v;
    return n;
}

NodePtr make_var(Variable v) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Var;
    n->var = v;
    return n;
}

NodePtr make_node(NodeKind kind, NodePtr lhs, NodePtr rhs = nullptr) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

NodePtr make_call(Func f, NodePtr arg) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Call;
    n->func = f;
    n->lhs = std::move(arg);
    return n;
}

bool is_lit(const NodePtr& n, double v) { return n->kind == NodeKind::Literal && n->value == v; }
bool is_lit(const NodePtr& n) { return n->kind == NodeKind::Literal; }

// ---------------------------------------------------------------- printing

int precedence(const Node& n) {
    switch (n.kind) {
        case NodeKind::Add:
        case NodeKind::Sub: return 1;
        case NodeKind::Mul:
        case NodeKind::Div: return 2;
        case NodeKind::Neg: return 3;
        case NodeKind::Pow: return 4;
        case NodeKind::Literal: return n.value < 0 || std::signbit(n.value) ? 3 : 5;
        default: return 5;
    }
}

std::string format_number(double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

void print(const Node& n, std::string& out);

void print_child(const Node& child, bool parens, std::string& out) {
    if (parens) out += '(';
    print(child, out);
    if (parens) out += ')';
}

void print(const Node& n, std::string& out) {
    switch (n.kind) {
        case NodeKind::Literal: out += format_number(n.value); return;
        case NodeKind::Var: out += n.var.name(); return;
        case NodeKind::Neg:
            out += '-';
            print_child(*n.lhs, precedence(*n.lhs) < 4, out);
            return;
        case NodeKind::Call:
            out += func_name(n.func);
            out += '(';
            print(*n.lhs, out);
            out += ')';
            return;
        case NodeKind::Pow:
            print_child(*n.lhs, precedence(*n.lhs) < 5, out);
            out += '^';
            print_child(*n.rhs, precedence(*n.rhs) < 3, out);
            return;
        default: break;
    }
    const int p = precedence(n);
    const char op = n.kind == NodeKind::Add ? '+' : n.kind == NodeKind::Sub ? '-' : n.kind == NodeKind::Mul ? '*' : '/';
    print_child(*n.lhs, precedence(*n.lhs) < p, out);
    out += op;
    print_child(*n.rhs, precedence(*n.rhs) <= p, out);
}

std::string node_text(const Node& n) {
    std::string s;
    print(n, s);
    return s;
}

// ----------------------------------------------------------------- parsing

class Parser {
public:
    Parser(std::string_view text, int n) : text_(text), n_(n) {}

    NodePtr parse_all() {
        NodePtr e = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) fail({"operator", "end of input"});
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(std::vector<std::string> expected) {
        std::string found = pos_ < text_.size() ? "'" + std::string(1, text_[pos_]) + "'" : "end of input";
        std::string msg = "syntax error at offset " + std::to_string(pos_) + ": found " + found + ", expected ";
        for (std::size_t i = 0; i < expected.size(); ++i) msg += (i ? " or " : "") + expected[i];
        throw ParseError(msg, pos_, std::move(expected));
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            if (accept('+'))
                lhs = make_node(NodeKind::Add, lhs, parse_term());
            else if (accept('-'))
                lhs = make_node(NodeKind::Sub, lhs, parse_term());
            else
                return lhs;
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (accept('*'))
                lhs = make_node(NodeKind::Mul, lhs, parse_unary());
            else if (accept('/'))
                lhs = make_node(NodeKind::Div, lhs, parse_unary());
            else
                return lhs;
        }
    }

    NodePtr parse_unary() {
        if (accept('-')) return make_node(NodeKind::Neg, parse_power());
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (accept('^')) return make_node(NodeKind::Pow, base, parse_unary());
        return base;
    }

    NodePtr parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) fail({"number", "identifier", "'('", "'-'"});
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr inner = parse_expr();
            if (!accept(')')) fail({"')'", "operator"});
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        fail({"number", "identifier", "'('", "'-'"});
    }

    NodePtr parse_number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t count = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_, ++count;
            return count;
        };
        std::size_t mantissa = digits();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            mantissa += digits();
        }
        if (mantissa == 0) fail({"digit"});
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (digits() == 0) fail({"exponent digits"});
        }
        double value = 0.0;
        const auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
        if (res.ec != std::errc() || !std::isfinite(value)) {
            pos_ = start;
            fail({"finite number"});
        }
        return make_literal(value);
    }

    NodePtr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string_view name = text_.substr(start, pos_ - start);

        for (const auto& [fname, fn] : kFunctions) {
            if (name == fname) {
                if (!accept('(')) fail({"'('"});
                NodePtr arg = parse_expr();
                if (!accept(')')) fail({"')'", "operator"});
                return make_call(fn, arg);
            }
        }
        if (name == "u") return make_var(Variable::u());
        if ((name[0] == 'x' || name[0] == 'p') && name.size() > 1) {
            int index = 0;
            const auto res = std::from_chars(name.data() + 1, name.data() + name.size(), index);
            if (res.ec == std::errc() && res.ptr == name.data() + name.size() && name[1] != '0' && index >= 1 &&
                index <= n_)
                return make_var(name[0] == 'x' ? Variable::x(index - 1) : Variable::p(index - 1));
        }
        throw UnknownIdentifier("unknown identifier '" + std::string(name) + "' at offset " + std::to_string(start) +
                                    " (dimension n = " + std::to_string(n_) + ")",
                                start, std::string(name));
    }

    std::string_view text_;
    int n_;
    std::size_t pos_ = 0;
};

// -------------------------------------------------------------- evaluation

[[noreturn]] void domain_fault(const Node& n, const std::string& why, double value) {
    const std::string text = node_text(n);
    throw DomainFault("domain fault in '" + text + "': " + why + " (value " + format_number(value) + ")", text, value);
}

double eval(const Node& n, const EvalEnv& env) {
    double r = 0.0;
    switch (n.kind) {
        case NodeKind::Literal: return n.value;
        case NodeKind::Var: {
            if (n.var.kind == VarKind::U) return env.u;
            const auto& src = n.var.kind == VarKind::X ? env.x : env.p;
            if (static_cast<std::size_t>(n.var.index) >= src.size())
                throw InvalidArgument("variable " + n.var.name() + " is not bound in the evaluation environment");
            return src[static_cast<std::size_t>(n.var.index)];
        }
        case NodeKind::Neg: return -eval(*n.lhs, env);
        case NodeKind::Add: r = eval(*n.lhs, env) + eval(*n.rhs, env); break;
        case NodeKind::Sub: r = eval(*n.lhs, env) - eval(*n.rhs, env); break;
        case NodeKind::Mul: r = eval(*n.lhs, env) * eval(*n.rhs, env); break;
        case NodeKind::Div: {
            const double num = eval(*n.lhs, env);
            const double den = eval(*n.rhs, env);
            if (den == 0.0) domain_fault(n, "division by zero", den);
            r = num / den;
            break;
        }
        case NodeKind::Pow: {
            const double base = eval(*n.lhs, env);
            const double expo = eval(*n.rhs, env);
            if (base < 0.0 && expo != std::floor(expo)) domain_fault(n, "negative base with non-integer exponent", base);
            if (base == 0.0 && expo < 0.0) domain_fault(n, "zero base with negative exponent", base);
            r = std::pow(base, expo);
            break;
        }
        case NodeKind::Call: {
            const double a = eval(*n.lhs, env);
            switch (n.func) {
                case Func::Exp: r = std::exp(a); break;
                case Func::Log:
                    if (!(a > 0.0)) domain_fault(n, "log of a non-positive value", a);
                    r = std::log(a);
                    break;
                case Func::Sin: r = std::sin(a); break;
                case Func::Cos: r = std::cos(a); break;
                case Func::Sqrt:
                    if (a < 0.0) domain_fault(n, "sqrt of a negative value", a);
                    r = std::sqrt(a);
                    break;
            }
            break;
        }
    }
    if (!std::isfinite(r)) domain_fault(n, "non-finite result", r);
    return r;
}

// ---------------------------------------------------- folding constructors

NodePtr fold_or(NodePtr built) {
    // Fold a node whose operands are all literals, unless evaluation faults.
    const bool all_lit = is_lit(built->lhs) && (!built->rhs || is_lit(built->rhs));
    if (!all_lit) return built;
    try {
        return make_literal(eval(*built, EvalEnv{}));
    } catch (const DomainFault&) {
        return built;
    }
}

NodePtr s_neg(NodePtr a) {
    if (is_lit(a)) return make_literal(-a->value);
    if (a->kind == NodeKind::Neg) return a->lhs;
    return make_node(NodeKind::Neg, a);
}

NodePtr s_add(NodePtr a, NodePtr b) {
    if (is_lit(a, 0.0)) return b;
    if (is_lit(b, 0.0)) return a;
    return fold_or(make_node(NodeKind::Add, a, b));
}

NodePtr s_sub(NodePtr a, NodePtr b) {
    if (is_lit(b, 0.0)) return a;
    if (is_lit(a, 0.0)) return s_neg(b);
    return fold_or(make_node(NodeKind::Sub, a, b));
}

NodePtr s_mul(NodePtr a, NodePtr b) {
    if (is_lit(a, 0.0) || is_lit(b, 0.0)) return make_literal(0.0);
    if (is_lit(a, 1.0)) return b;
    if (is_lit(b, 1.0)) return a;
    return fold_or(make_node(NodeKind::Mul, a, b));
}

NodePtr s_div(NodePtr a, NodePtr b) {
    if (is_lit(a, 0.0) && !is_lit(b, 0.0)) return make_literal(0.0);
    if (is_lit(b, 1.0)) return a;
    return fold_or(make_node(NodeKind::Div, a, b));
}

NodePtr s_pow(NodePtr a, NodePtr b) {
    if (is_lit(b, 1.0)) return a;
    if (is_lit(b, 0.0)) return make_literal(1.0);
    return fold_or(make_node(NodeKind::Pow, a, b));
}

NodePtr s_call(Func f, NodePtr a) { return fold_or(make_call(f, a)); }

bool node_depends(const Node& n, Variable v) {
    switch (n.kind) {
        case NodeKind::Literal: return false;
        case NodeKind::Var: return n.var == v;
        default: return node_depends(*n.lhs, v) || (n.rhs && node_depends(*n.rhs, v));
    }
}

NodePtr diff(const NodePtr& n, Variable v) {
    if (!node_depends(*n, v)) return make_literal(0.0);
    const NodePtr& a = n->lhs;
    const NodePtr& b = n->rhs;
    switch (n->kind) {
        case NodeKind::Literal: return make_literal(0.0);
        case NodeKind::Var: return make_literal(n->var == v ? 1.0 : 0.0);
        case NodeKind::Neg: return s_neg(diff(a, v));
        case NodeKind::Add: return s_add(diff(a, v), diff(b, v));
        case NodeKind::Sub: return s_sub(diff(a, v), diff(b, v));
        case NodeKind::Mul: return s_add(s_mul(diff(a, v), b), s_mul(a, diff(b, v)));
        case NodeKind::Div:
            return s_div(s_sub(s_mul(diff(a, v), b), s_mul(a, diff(b, v))), s_pow(b, make_literal(2.0)));
        case NodeKind::Pow:
            if (!node_depends(*b, v)) {
                const NodePtr reduced = s_sub(b, make_literal(1.0));
                return s_mul(s_mul(b, s_pow(a, reduced)), diff(a, v));
            }
            // d(a^b) = a^b * (b' log a + b a' / a)
            return s_mul(n, s_add(s_mul(diff(b, v), s_call(Func::Log, a)), s_div(s_mul(b, diff(a, v)), a)));
        case NodeKind::Call: {
            const NodePtr da = diff(a, v);
            switch (n->func) {
                case Func::Exp: return s_mul(n, da);
                case Func::Log: return s_div(da, a);
                case Func::Sin: return s_mul(s_call(Func::Cos, a), da);
                case Func::Cos: return s_neg(s_mul(s_call(Func::Sin, a), da));
                case Func::Sqrt: return s_div(da, s_mul(make_literal(2.0), n));
            }
        }
    }
    return make_literal(0.0);
}

bool same(const Node& a, const Node& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case NodeKind::Literal: return a.value == b.value;
        case NodeKind::Var: return a.var == b.var;
        case NodeKind::Call: return a.func == b.func && same(*a.lhs, *b.lhs);
        case NodeKind::Neg: return same(*a.lhs, *b.lhs);
        default: return same(*a.lhs, *b.lhs) && same(*a.rhs, *b.rhs);
    }
}

}  // namespace

std::string Variable::name() const {
    switch (kind) {
        case VarKind::X: return "x" + std::to_string(index + 1);
        case VarKind::P: return "p" + std::to_string(index + 1);
        case VarKind::U: return "u";
    }
    return "?";
}

Expr::Expr() : root_(make_literal(0.0)) {}

bool Expr::is_literal() const noexcept { return root_->kind == NodeKind::Literal; }
double Expr::literal_value() const noexcept { return root_->value; }

bool operator==(const Expr& a, const Expr& b) { return same(*a.root_, *b.root_); }

Expr parse(std::string_view text, int n) { return Expr(Parser(text, n).parse_all()); }

double evaluate(const Expr& e, const EvalEnv& env) { return eval(e.root(), env); }

Expr differentiate(const Expr& e, Variable var) { return Expr(diff(e.ptr(), var)); }

bool depends_on(const Expr& e, Variable var) { return node_depends(e.root(), var); }

std::string to_string(const Expr& e) { return node_text(e.root()); }

Expr literal(double v) { return Expr(make_literal(v)); }
Expr variable(Variable v) { return Expr(make_var(v)); }

}  // namespace hessquot::expr
