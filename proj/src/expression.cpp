#include "parnewt/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>
#include <vector>

#include "parnewt/csv.hpp"  // format_double

namespace parnewt::expr {

namespace {

NodePtr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

NodePtr raw_binary(Node::Op op, NodePtr a, NodePtr b) {
    Node n;
    n.op = op;
    n.a = std::move(a);
    n.b = std::move(b);
    return make(std::move(n));
}

NodePtr raw_unary(Node::Op op, NodePtr a) {
    Node n;
    n.op = op;
    n.a = std::move(a);
    return make(std::move(n));
}

bool is_const(const NodePtr& n, double v) { return n->op == Node::Op::Const && n->value == v; }
bool is_const(const NodePtr& n) { return n->op == Node::Op::Const; }

}  // namespace

NodePtr constant(double c) {
    Node n;
    n.op = Node::Op::Const;
    n.value = c;
    return make(std::move(n));
}

NodePtr variable(Var v) {
    Node n;
    n.op = Node::Op::Variable;
    n.var = v;
    return make(std::move(n));
}

NodePtr add(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    if (is_const(a) && is_const(b)) return constant(a->value + b->value);
    return raw_binary(Node::Op::Add, std::move(a), std::move(b));
}

NodePtr sub(NodePtr a, NodePtr b) {
    if (is_const(b, 0.0)) return a;
    if (is_const(a) && is_const(b)) return constant(a->value - b->value);
    if (is_const(a, 0.0)) return neg(std::move(b));
    return raw_binary(Node::Op::Sub, std::move(a), std::move(b));
}

NodePtr mul(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0) || is_const(b, 0.0)) return constant(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    if (is_const(a) && is_const(b)) return constant(a->value * b->value);
    return raw_binary(Node::Op::Mul, std::move(a), std::move(b));
}

NodePtr divide(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0)) return constant(0.0);
    if (is_const(b, 1.0)) return a;
    if (is_const(a) && is_const(b) && b->value != 0.0) return constant(a->value / b->value);
    return raw_binary(Node::Op::Div, std::move(a), std::move(b));
}

NodePtr neg(NodePtr a) {
    if (is_const(a)) return constant(-a->value);
    if (a->op == Node::Op::Neg) return a->a;
    return raw_unary(Node::Op::Neg, std::move(a));
}

NodePtr pow_of(NodePtr a, double e) {
    if (e == 0.0) return constant(1.0);
    if (e == 1.0) return a;
    if (is_const(a)) return constant(std::pow(a->value, e));
    if (e < 0.0) return divide(constant(1.0), pow_of(std::move(a), -e));
    Node n;
    n.op = Node::Op::Pow;
    n.value = e;
    n.a = std::move(a);
    return make(std::move(n));
}

NodePtr unary(Node::Op op, NodePtr a) { return raw_unary(op, std::move(a)); }
NodePtr binary_call(Node::Op op, NodePtr a, NodePtr b) {
    return raw_binary(op, std::move(a), std::move(b));
}

const char* var_name(Var v) {
    switch (v) {
        case Var::X1: return "x1";
        case Var::X2: return "x2";
        case Var::T: return "t";
        case Var::U: return "u";
        case Var::Xi1: return "xi1";
        case Var::Xi2: return "xi2";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Parser. Operates on the whitespace-stripped text; all reported offsets
// index that stripped text.
// ---------------------------------------------------------------------------

namespace {

struct FunctionInfo {
    Node::Op op;
    int arity;
};

const std::map<std::string, FunctionInfo>& function_table() {
    static const std::map<std::string, FunctionInfo> table = {
        {"sin", {Node::Op::Sin, 1}},  {"cos", {Node::Op::Cos, 1}},
        {"exp", {Node::Op::Exp, 1}},  {"log", {Node::Op::Log, 1}},
        {"abs", {Node::Op::Abs, 1}},  {"sign", {Node::Op::Sign, 1}},
        {"sqrt", {Node::Op::Sqrt, 1}}, {"min", {Node::Op::Min, 2}},
        {"max", {Node::Op::Max, 2}},
    };
    return table;
}

class Parser {
public:
    Parser(std::string text, int dim) : text_(std::move(text)), dim_(dim) {}

    NodePtr run() {
        NodePtr e = parse_expr();
        if (pos_ != text_.size()) throw ParseError(pos_, "unexpected trailing input");
        return e;
    }

private:
    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    char take() { return text_[pos_++]; }
    bool done() const { return pos_ >= text_.size(); }

    NodePtr parse_expr() {
        NodePtr e = parse_term();
        while (peek() == '+' || peek() == '-') {
            const char op = take();
            NodePtr rhs = parse_term();
            e = raw_binary(op == '+' ? Node::Op::Add : Node::Op::Sub, std::move(e), std::move(rhs));
        }
        return e;
    }

    NodePtr parse_term() {
        NodePtr e = parse_factor();
        while (peek() == '*' || peek() == '/') {
            const char op = take();
            NodePtr rhs = parse_factor();
            e = raw_binary(op == '*' ? Node::Op::Mul : Node::Op::Div, std::move(e), std::move(rhs));
        }
        return e;
    }

    NodePtr parse_factor() {
        if (peek() == '-') {
            take();
            return raw_unary(Node::Op::Neg, parse_factor());
        }
        NodePtr base = parse_base();
        if (peek() == '^') {
            take();
            Node n;
            n.op = Node::Op::Pow;
            n.value = parse_number();
            n.a = std::move(base);
            return make(std::move(n));
        }
        return base;
    }

    NodePtr parse_base() {
        const char c = peek();
        if (done()) throw ParseError(pos_, "unexpected end of input, expected an operand");
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return constant(parse_number());
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_name();
        if (c == '(') {
            take();
            NodePtr e = parse_expr();
            expect(')');
            return e;
        }
        throw ParseError(pos_, std::string("unexpected character '") + c + "'");
    }

    NodePtr parse_name() {
        const std::size_t start = pos_;
        while (!done() && (std::isalnum(static_cast<unsigned char>(peek())))) take();
        const std::string name = text_.substr(start, pos_ - start);

        if (auto it = function_table().find(name); it != function_table().end()) {
            if (peek() != '(')
                throw ParseError(pos_, "'" + name + "' is a function and needs arguments");
            take();
            std::vector<NodePtr> args;
            args.push_back(parse_expr());
            while (peek() == ',') {
                take();
                args.push_back(parse_expr());
            }
            expect(')');
            if (static_cast<int>(args.size()) != it->second.arity)
                throw ParseError(start, "'" + name + "' expects " +
                                            std::to_string(it->second.arity) + " argument(s), got " +
                                            std::to_string(args.size()));
            return it->second.arity == 1 ? raw_unary(it->second.op, args[0])
                                         : raw_binary(it->second.op, args[0], args[1]);
        }

        static const std::map<std::string, Var> vars = {
            {"x1", Var::X1}, {"x2", Var::X2},   {"t", Var::T},
            {"u", Var::U},   {"xi1", Var::Xi1}, {"xi2", Var::Xi2},
        };
        if (auto it = vars.find(name); it != vars.end()) {
            const bool second_axis = it->second == Var::X2 || it->second == Var::Xi2;
            if (second_axis && dim_ < 2)
                throw ParseError(start, "unknown identifier '" + name + "' on a 1D problem");
            return variable(it->second);
        }
        throw ParseError(start, "unknown identifier '" + name + "'");
    }

    double parse_number() {
        const std::size_t start = pos_;
        while (!done() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.')) take();
        if (!done() && (peek() == 'e' || peek() == 'E')) {
            const std::size_t mark = pos_;
            take();
            if (peek() == '+' || peek() == '-') take();
            if (!std::isdigit(static_cast<unsigned char>(peek())))
                pos_ = mark;  // not an exponent after all
            else
                while (!done() && std::isdigit(static_cast<unsigned char>(peek()))) take();
        }
        const std::string token = text_.substr(start, pos_ - start);
        if (token.empty()) throw ParseError(start, "expected a number");
        char* end = nullptr;
        const double v = std::strtod(token.c_str(), &end);
        if (end != token.c_str() + token.size())
            throw ParseError(start, "malformed number '" + token + "'");
        return v;
    }

    void expect(char c) {
        if (peek() != c)
            throw ParseError(pos_, std::string("expected '") + c + "'");
        take();
    }

    std::string text_;
    int dim_;
    std::size_t pos_ = 0;
};

}  // namespace

NodePtr parse(const std::string& text, int dim) {
    std::string stripped;
    stripped.reserve(text.size());
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) stripped.push_back(c);
    if (stripped.empty()) throw ParseError(0, "empty expression");
    return Parser(std::move(stripped), dim).run();
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

double eval_rec(const Node& n, const EvalPoint& p) {
    using Op = Node::Op;
    switch (n.op) {
        case Op::Const: return n.value;
        case Op::Variable:
            switch (n.var) {
                case Var::X1: return p.x[0];
                case Var::X2: return p.x[1];
                case Var::T: return p.t;
                case Var::U: return p.u;
                case Var::Xi1: return p.xi[0];
                case Var::Xi2: return p.xi[1];
            }
            return 0.0;
        case Op::Add: return eval_rec(*n.a, p) + eval_rec(*n.b, p);
        case Op::Sub: return eval_rec(*n.a, p) - eval_rec(*n.b, p);
        case Op::Mul: return eval_rec(*n.a, p) * eval_rec(*n.b, p);
        case Op::Div: {
            const double den = eval_rec(*n.b, p);
            if (den == 0.0) throw EvalError("division by zero", to_string(n.b));
            return eval_rec(*n.a, p) / den;
        }
        case Op::Neg: return -eval_rec(*n.a, p);
        case Op::Pow: {
            const double base = eval_rec(*n.a, p);
            const double e = n.value;
            if (base < 0.0 && e != std::floor(e))
                throw EvalError("non-integer power of a negative base", to_string(n.a));
            if (base == 0.0 && e < 0.0)
                throw EvalError("negative power of zero", to_string(n.a));
            return std::pow(base, e);
        }
        case Op::Sin: return std::sin(eval_rec(*n.a, p));
        case Op::Cos: return std::cos(eval_rec(*n.a, p));
        case Op::Exp: return std::exp(eval_rec(*n.a, p));
        case Op::Log: {
            const double v = eval_rec(*n.a, p);
            if (v <= 0.0) throw EvalError("log of a non-positive value", to_string(n.a));
            return std::log(v);
        }
        case Op::Abs: return std::abs(eval_rec(*n.a, p));
        case Op::Sign: {
            const double v = eval_rec(*n.a, p);
            return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
        }
        case Op::Sqrt: {
            const double v = eval_rec(*n.a, p);
            if (v < 0.0) throw EvalError("sqrt of a negative value", to_string(n.a));
            return std::sqrt(v);
        }
        case Op::Min: return std::min(eval_rec(*n.a, p), eval_rec(*n.b, p));
        case Op::Max: return std::max(eval_rec(*n.a, p), eval_rec(*n.b, p));
    }
    return 0.0;
}

}  // namespace

double evaluate(const NodePtr& node, const EvalPoint& p) {
    const double v = eval_rec(*node, p);
    if (!std::isfinite(v)) throw EvalError("non-finite result", to_string(node));
    return v;
}

// ---------------------------------------------------------------------------
// Differentiation
// ---------------------------------------------------------------------------

NodePtr differentiate(const NodePtr& n, Var v) {
    using Op = Node::Op;
    switch (n->op) {
        case Op::Const: return constant(0.0);
        case Op::Variable: return constant(n->var == v ? 1.0 : 0.0);
        case Op::Add: return add(differentiate(n->a, v), differentiate(n->b, v));
        case Op::Sub: return sub(differentiate(n->a, v), differentiate(n->b, v));
        case Op::Mul:
            return add(mul(differentiate(n->a, v), n->b), mul(n->a, differentiate(n->b, v)));
        case Op::Div:
            return divide(sub(mul(differentiate(n->a, v), n->b), mul(n->a, differentiate(n->b, v))),
                          pow_of(n->b, 2.0));
        case Op::Neg: return neg(differentiate(n->a, v));
        case Op::Pow:
            // d (a^c) = c a^(c-1) a'
            return mul(mul(constant(n->value), pow_of(n->a, n->value - 1.0)),
                       differentiate(n->a, v));
        case Op::Sin: return mul(unary(Op::Cos, n->a), differentiate(n->a, v));
        case Op::Cos: return neg(mul(unary(Op::Sin, n->a), differentiate(n->a, v)));
        case Op::Exp: return mul(unary(Op::Exp, n->a), differentiate(n->a, v));
        case Op::Log: return divide(differentiate(n->a, v), n->a);
        case Op::Abs: return mul(unary(Op::Sign, n->a), differentiate(n->a, v));
        case Op::Sign: return constant(0.0);
        case Op::Sqrt:
            return divide(differentiate(n->a, v), mul(constant(2.0), unary(Op::Sqrt, n->a)));
        case Op::Min:
        case Op::Max: {
            // min = (a+b-|a-b|)/2, max = (a+b+|a-b|)/2
            NodePtr da = differentiate(n->a, v);
            NodePtr db = differentiate(n->b, v);
            NodePtr sum = add(da, db);
            NodePtr kink = mul(unary(Op::Sign, sub(n->a, n->b)), sub(da, db));
            NodePtr inner = n->op == Op::Min ? sub(std::move(sum), std::move(kink))
                                             : add(std::move(sum), std::move(kink));
            return divide(std::move(inner), constant(2.0));
        }
    }
    return constant(0.0);
}

// ---------------------------------------------------------------------------
// Printing / structure
// ---------------------------------------------------------------------------

namespace {

// precedence: Add/Sub 1, Mul/Div 2, Neg 3, Pow 4, leaves and calls 5
int precedence(const Node& n) {
    using Op = Node::Op;
    switch (n.op) {
        case Op::Add:
        case Op::Sub: return 1;
        case Op::Mul:
        case Op::Div: return 2;
        case Op::Neg: return 3;
        case Op::Pow: return 4;
        default: return 5;
    }
}

void print_rec(const Node& n, int parent_prec, std::string& out) {
    using Op = Node::Op;
    const int prec = precedence(n);
    const bool wrap = prec < parent_prec;
    if (wrap) out += '(';
    switch (n.op) {
        case Op::Const: out += format_double(n.value); break;
        case Op::Variable: out += var_name(n.var); break;
        case Op::Add:
            print_rec(*n.a, 1, out); out += " + "; print_rec(*n.b, 2, out); break;
        case Op::Sub:
            print_rec(*n.a, 1, out); out += " - "; print_rec(*n.b, 2, out); break;
        case Op::Mul:
            print_rec(*n.a, 2, out); out += "*"; print_rec(*n.b, 3, out); break;
        case Op::Div:
            print_rec(*n.a, 2, out); out += "/"; print_rec(*n.b, 3, out); break;
        case Op::Neg:
            out += '-'; print_rec(*n.a, 3, out); break;
        case Op::Pow:
            print_rec(*n.a, 5, out); out += '^'; out += format_double(n.value); break;
        case Op::Sin: case Op::Cos: case Op::Exp: case Op::Log:
        case Op::Abs: case Op::Sign: case Op::Sqrt: {
            const char* name = n.op == Op::Sin   ? "sin"
                               : n.op == Op::Cos ? "cos"
                               : n.op == Op::Exp ? "exp"
                               : n.op == Op::Log ? "log"
                               : n.op == Op::Abs ? "abs"
                               : n.op == Op::Sign ? "sign" : "sqrt";
            out += name; out += '('; print_rec(*n.a, 0, out); out += ')';
            break;
        }
        case Op::Min: case Op::Max:
            out += n.op == Op::Min ? "min(" : "max(";
            print_rec(*n.a, 0, out); out += ", "; print_rec(*n.b, 0, out); out += ')';
            break;
    }
    if (wrap) out += ')';
}

}  // namespace

std::string to_string(const NodePtr& node) {
    std::string out;
    print_rec(*node, 0, out);
    return out;
}

bool equal(const NodePtr& a, const NodePtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->op != b->op || a->value != b->value || a->var != b->var) return false;
    if ((a->a == nullptr) != (b->a == nullptr)) return false;
    if ((a->b == nullptr) != (b->b == nullptr)) return false;
    if (a->a && !equal(a->a, b->a)) return false;
    if (a->b && !equal(a->b, b->b)) return false;
    return true;
}

bool depends_on(const NodePtr& n, Var v) {
    if (!n) return false;
    if (n->op == Node::Op::Variable) return n->var == v;
    return depends_on(n->a, v) || depends_on(n->b, v);
}

bool has_kinked_primitive(const NodePtr& n) {
    if (!n) return false;
    using Op = Node::Op;
    if (n->op == Op::Abs || n->op == Op::Sign || n->op == Op::Min || n->op == Op::Max) return true;
    return has_kinked_primitive(n->a) || has_kinked_primitive(n->b);
}

}  // namespace parnewt::expr
