#include "qpf/expr.hpp"

#include <cctype>
#include <functional>
#include <cmath>
#include <vector>

namespace qpf {
namespace detail {

enum class Op { Const, Theta, X, Add, Sub, Mul, Div, Pow, Neg, Call };

struct ExprNode {
    Op op = Op::Const;
    double value = 0.0;      // Const
    std::string func;        // Call
    std::shared_ptr<const ExprNode> a, b;
};

using NodePtr = std::shared_ptr<const ExprNode>;

namespace {

NodePtr make_const(double v) {
    auto n = std::make_shared<ExprNode>();
    n->op = Op::Const;
    n->value = v;
    return n;
}

NodePtr make_node(Op op, NodePtr a, NodePtr b = nullptr) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_call(const std::string& f, NodePtr a) {
    auto n = std::make_shared<ExprNode>();
    n->op = Op::Call;
    n->func = f;
    n->a = std::move(a);
    return n;
}

bool is_const(const NodePtr& n, double v) {
    return n->op == Op::Const && n->value == v;
}

struct Token {
    enum Kind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };
    Kind kind;
    double number = 0.0;
    std::string ident;
    std::size_t pos = 0;
};

std::vector<Token> tokenize(const std::string& src) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        Token t;
        t.pos = i;
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            try {
                t.number = std::stod(src.substr(i), &used);
            } catch (const std::exception&) {
                throw ParseError("malformed number", i);
            }
            t.kind = Token::Number;
            i += used;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                ++j;
            t.kind = Token::Ident;
            t.ident = src.substr(i, j - i);
            i = j;
        } else {
            switch (c) {
                case '+': t.kind = Token::Plus; break;
                case '-': t.kind = Token::Minus; break;
                case '*': t.kind = Token::Star; break;
                case '/': t.kind = Token::Slash; break;
                case '^': t.kind = Token::Caret; break;
                case '(': t.kind = Token::LParen; break;
                case ')': t.kind = Token::RParen; break;
                case ',': t.kind = Token::Comma; break;
                default:
                    throw ParseError(std::string("unexpected character '") + c + "'", i);
            }
            ++i;
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.kind = Token::End;
    end.pos = src.size();
    out.push_back(end);
    return out;
}

const char* const kFunctions[] = {"sin", "cos", "tan", "atan", "exp", "log", "abs"};

bool is_function(const std::string& name) {
    for (const char* f : kFunctions)
        if (name == f) return true;
    return false;
}

class Parser {
public:
    Parser(std::vector<Token> tokens, const std::map<std::string, double>& params)
        : tokens_(std::move(tokens)), params_(params) {}

    NodePtr parse() {
        NodePtr e = expression();
        if (peek().kind != Token::End)
            throw ParseError("unexpected trailing input", peek().pos);
        return e;
    }

private:
    const Token& peek() const { return tokens_[pos_]; }
    Token take() { return tokens_[pos_++]; }
    bool accept(Token::Kind k) {
        if (peek().kind == k) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expression() {
        NodePtr left = term();
        for (;;) {
            if (accept(Token::Plus))
                left = make_node(Op::Add, left, term());
            else if (accept(Token::Minus))
                left = make_node(Op::Sub, left, term());
            else
                return left;
        }
    }

    NodePtr term() {
        NodePtr left = unary();
        for (;;) {
            if (accept(Token::Star))
                left = make_node(Op::Mul, left, unary());
            else if (accept(Token::Slash))
                left = make_node(Op::Div, left, unary());
            else
                return left;
        }
    }

    NodePtr unary() {
        if (accept(Token::Minus)) return make_node(Op::Neg, unary());
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (accept(Token::Caret)) return make_node(Op::Pow, base, unary());  // right-assoc
        return base;
    }

    NodePtr primary() {
        const Token& t = peek();
        switch (t.kind) {
            case Token::Number:
                return make_const(take().number);
            case Token::Ident: {
                Token id = take();
                if (is_function(id.ident)) {
                    if (!accept(Token::LParen))
                        throw ParseError("expected '(' after function " + id.ident, peek().pos);
                    NodePtr arg = expression();
                    if (!accept(Token::RParen))
                        throw ParseError("expected ')' closing call to " + id.ident, peek().pos);
                    return make_call(id.ident, arg);
                }
                if (id.ident == "pi") return make_const(M_PI);
                if (id.ident == "theta") return make_node(Op::Theta, nullptr);
                if (id.ident == "x") return make_node(Op::X, nullptr);
                auto it = params_.find(id.ident);
                if (it == params_.end())
                    throw ParseError("unbound identifier '" + id.ident + "'", id.pos);
                return make_const(it->second);
            }
            case Token::LParen: {
                take();
                NodePtr e = expression();
                if (!accept(Token::RParen))
                    throw ParseError("expected ')'", peek().pos);
                return e;
            }
            default:
                throw ParseError("expected value", t.pos);
        }
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    const std::map<std::string, double>& params_;
};

double eval_node(const ExprNode& n, double theta, double x) {
    switch (n.op) {
        case Op::Const: return n.value;
        case Op::Theta: return theta;
        case Op::X: return x;
        case Op::Add: return eval_node(*n.a, theta, x) + eval_node(*n.b, theta, x);
        case Op::Sub: return eval_node(*n.a, theta, x) - eval_node(*n.b, theta, x);
        case Op::Mul: return eval_node(*n.a, theta, x) * eval_node(*n.b, theta, x);
        case Op::Div: {
            double d = eval_node(*n.b, theta, x);
            if (d == 0.0)
                throw EvalError("division by zero at (theta=" + std::to_string(theta) +
                                ", x=" + std::to_string(x) + ")");
            return eval_node(*n.a, theta, x) / d;
        }
        case Op::Pow: return std::pow(eval_node(*n.a, theta, x), eval_node(*n.b, theta, x));
        case Op::Neg: return -eval_node(*n.a, theta, x);
        case Op::Call: {
            double v = eval_node(*n.a, theta, x);
            if (n.func == "sin") return std::sin(v);
            if (n.func == "cos") return std::cos(v);
            if (n.func == "tan") return std::tan(v);
            if (n.func == "atan") return std::atan(v);
            if (n.func == "exp") return std::exp(v);
            if (n.func == "abs") return std::abs(v);
            if (n.func == "log") {
                if (v <= 0.0)
                    throw EvalError("log of non-positive value at (theta=" +
                                    std::to_string(theta) + ", x=" + std::to_string(x) + ")");
                return std::log(v);
            }
            throw EvalError("unknown function " + n.func);
        }
    }
    throw EvalError("corrupt expression node");
}

bool node_depends_on_x(const ExprNode& n) {
    switch (n.op) {
        case Op::X: return true;
        case Op::Const:
        case Op::Theta: return false;
        default:
            return (n.a && node_depends_on_x(*n.a)) || (n.b && node_depends_on_x(*n.b));
    }
}

NodePtr diff_x(const NodePtr& n);

NodePtr diff_call(const ExprNode& n) {
    NodePtr da = diff_x(n.a);
    NodePtr inner;
    if (n.func == "sin") inner = make_call("cos", n.a);
    else if (n.func == "cos") inner = make_node(Op::Neg, make_call("sin", n.a));
    else if (n.func == "tan") {
        NodePtr c = make_call("cos", n.a);
        inner = make_node(Op::Div, make_const(1.0), make_node(Op::Mul, c, c));
    } else if (n.func == "atan") {
        NodePtr sq = make_node(Op::Mul, n.a, n.a);
        inner = make_node(Op::Div, make_const(1.0), make_node(Op::Add, make_const(1.0), sq));
    } else if (n.func == "exp") inner = make_call("exp", n.a);
    else if (n.func == "log") inner = make_node(Op::Div, make_const(1.0), n.a);
    else if (n.func == "abs")
        inner = make_node(Op::Div, n.a, make_call("abs", n.a));  // sign, undefined at 0
    else throw EvalError("cannot differentiate function " + n.func);
    if (is_const(da, 1.0)) return inner;
    return make_node(Op::Mul, inner, da);
}

NodePtr diff_x(const NodePtr& n) {
    switch (n->op) {
        case Op::Const:
        case Op::Theta: return make_const(0.0);
        case Op::X: return make_const(1.0);
        case Op::Add: return make_node(Op::Add, diff_x(n->a), diff_x(n->b));
        case Op::Sub: return make_node(Op::Sub, diff_x(n->a), diff_x(n->b));
        case Op::Mul: {
            NodePtr da = diff_x(n->a), db = diff_x(n->b);
            if (is_const(da, 0.0) && is_const(db, 0.0)) return make_const(0.0);
            if (is_const(da, 0.0)) return make_node(Op::Mul, n->a, db);
            if (is_const(db, 0.0)) return make_node(Op::Mul, da, n->b);
            return make_node(Op::Add, make_node(Op::Mul, da, n->b),
                             make_node(Op::Mul, n->a, db));
        }
        case Op::Div: {
            NodePtr da = diff_x(n->a), db = diff_x(n->b);
            if (is_const(db, 0.0)) return make_node(Op::Div, da, n->b);
            NodePtr num = make_node(Op::Sub, make_node(Op::Mul, da, n->b),
                                    make_node(Op::Mul, n->a, db));
            return make_node(Op::Div, num, make_node(Op::Mul, n->b, n->b));
        }
        case Op::Pow: {
            // f^g: general rule f^g * (g' log f + g f'/f)
            NodePtr df = diff_x(n->a), dg = diff_x(n->b);
            if (is_const(dg, 0.0)) {
                // g constant: g * f^(g-1) * f'
                NodePtr gm1 = make_node(Op::Sub, n->b, make_const(1.0));
                NodePtr p = make_node(Op::Pow, n->a, gm1);
                NodePtr r = make_node(Op::Mul, n->b, p);
                if (is_const(df, 1.0)) return r;
                return make_node(Op::Mul, r, df);
            }
            NodePtr t1 = make_node(Op::Mul, dg, make_call("log", n->a));
            NodePtr t2 = make_node(Op::Mul, n->b, make_node(Op::Div, df, n->a));
            return make_node(Op::Mul, n, make_node(Op::Add, t1, t2));
        }
        case Op::Neg: return make_node(Op::Neg, diff_x(n->a));
        case Op::Call: return diff_call(*n);
    }
    throw EvalError("corrupt expression node");
}

}  // namespace
}  // namespace detail

namespace {

// opcodes of the flat postfix program; values >= 100 are function calls
enum Opcode {
    kPushConst = 0,
    kPushTheta,
    kPushX,
    kAdd,
    kSub,
    kMul,
    kDiv,
    kPow,
    kNeg,
    kFnSin = 100,
    kFnCos,
    kFnTan,
    kFnAtan,
    kFnExp,
    kFnLog,
    kFnAbs,
};

int function_opcode(const std::string& name) {
    if (name == "sin") return kFnSin;
    if (name == "cos") return kFnCos;
    if (name == "tan") return kFnTan;
    if (name == "atan") return kFnAtan;
    if (name == "exp") return kFnExp;
    if (name == "log") return kFnLog;
    return kFnAbs;
}

}  // namespace

MapExpression::MapExpression(std::string source, std::map<std::string, double> parameters)
    : source_(std::move(source)), params_(std::move(parameters)) {
    detail::Parser parser(detail::tokenize(source_), params_);
    root_ = parser.parse();
    compile();
}

MapExpression::MapExpression(std::shared_ptr<const detail::ExprNode> root, std::string source,
                             std::map<std::string, double> parameters)
    : root_(std::move(root)), source_(std::move(source)), params_(std::move(parameters)) {
    compile();
}

void MapExpression::compile() {
    program_.clear();
    int depth = 0;
    max_stack_ = 0;
    std::function<void(const detail::ExprNode&)> emit = [&](const detail::ExprNode& n) {
        using detail::Op;
        switch (n.op) {
            case Op::Const:
                program_.push_back({kPushConst, n.value});
                max_stack_ = std::max(max_stack_, ++depth);
                return;
            case Op::Theta:
                program_.push_back({kPushTheta, 0.0});
                max_stack_ = std::max(max_stack_, ++depth);
                return;
            case Op::X:
                program_.push_back({kPushX, 0.0});
                max_stack_ = std::max(max_stack_, ++depth);
                return;
            case Op::Neg:
                emit(*n.a);
                program_.push_back({kNeg, 0.0});
                return;
            case Op::Call:
                emit(*n.a);
                program_.push_back({function_opcode(n.func), 0.0});
                return;
            default:
                emit(*n.a);
                emit(*n.b);
                --depth;
                switch (n.op) {
                    case Op::Add: program_.push_back({kAdd, 0.0}); break;
                    case Op::Sub: program_.push_back({kSub, 0.0}); break;
                    case Op::Mul: program_.push_back({kMul, 0.0}); break;
                    case Op::Div: program_.push_back({kDiv, 0.0}); break;
                    default: program_.push_back({kPow, 0.0}); break;
                }
                return;
        }
    };
    emit(*root_);
}

double MapExpression::eval(double theta, double x_hat) const {
    double stack[64];
    if (max_stack_ >= 64) return detail::eval_node(*root_, theta, x_hat);
    int top = -1;
    for (const Instr& in : program_) {
        switch (in.op) {
            case kPushConst: stack[++top] = in.value; break;
            case kPushTheta: stack[++top] = theta; break;
            case kPushX: stack[++top] = x_hat; break;
            case kAdd: --top; stack[top] += stack[top + 1]; break;
            case kSub: --top; stack[top] -= stack[top + 1]; break;
            case kMul: --top; stack[top] *= stack[top + 1]; break;
            case kDiv:
                --top;
                if (stack[top + 1] == 0.0)
                    throw EvalError("division by zero at (theta=" + std::to_string(theta) +
                                    ", x=" + std::to_string(x_hat) + ")");
                stack[top] /= stack[top + 1];
                break;
            case kPow: --top; stack[top] = std::pow(stack[top], stack[top + 1]); break;
            case kNeg: stack[top] = -stack[top]; break;
            case kFnSin: stack[top] = std::sin(stack[top]); break;
            case kFnCos: stack[top] = std::cos(stack[top]); break;
            case kFnTan: stack[top] = std::tan(stack[top]); break;
            case kFnAtan: stack[top] = std::atan(stack[top]); break;
            case kFnExp: stack[top] = std::exp(stack[top]); break;
            case kFnAbs: stack[top] = std::abs(stack[top]); break;
            case kFnLog:
                if (stack[top] <= 0.0)
                    throw EvalError("log of non-positive value at (theta=" +
                                    std::to_string(theta) + ", x=" + std::to_string(x_hat) +
                                    ")");
                stack[top] = std::log(stack[top]);
                break;
        }
    }
    return stack[0];
}

MapExpression MapExpression::derivative_x() const {
    return MapExpression(detail::diff_x(root_), "d/dx(" + source_ + ")", params_);
}

bool MapExpression::depends_on_x() const { return detail::node_depends_on_x(*root_); }

}  // namespace qpf
