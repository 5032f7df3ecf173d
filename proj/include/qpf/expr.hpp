#ifndef QPF_EXPR_HPP
#define QPF_EXPR_HPP

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "qpf/circle.hpp"

// Minimal expression DSL for user-defined fibre lifts: identifiers theta, x
// and named parameters; operators + - * / ^; functions sin, cos, tan, atan,
// exp, log, abs; constant pi. No conditionals, so every well-formed
// expression is continuous wherever it is defined.

namespace qpf {

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position)
        : Error(what + " (at position " + std::to_string(position) + ")"),
          position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

class EvalError : public Error {
public:
    explicit EvalError(const std::string& what) : Error(what) {}
};

namespace detail {
struct ExprNode;
}

class MapExpression {
public:
    // Parses source and binds parameters; unbound identifiers (other than
    // theta, x, pi) are rejected up front.
    MapExpression(std::string source, std::map<std::string, double> parameters);

    double eval(double theta, double x_hat) const;
    double eval(CirclePoint theta, double x_hat) const { return eval(theta.value(), x_hat); }

    // Symbolic derivative with respect to x; parameters are shared.
    MapExpression derivative_x() const;

    bool depends_on_x() const;
    const std::string& source() const { return source_; }
    const std::map<std::string, double>& parameters() const { return params_; }

private:
    MapExpression(std::shared_ptr<const detail::ExprNode> root, std::string source,
                  std::map<std::string, double> parameters);
    void compile();

    std::shared_ptr<const detail::ExprNode> root_;
    std::string source_;
    std::map<std::string, double> params_;
    // flat postfix program for fast evaluation
    struct Instr {
        int op;
        double value;
    };
    std::vector<Instr> program_;
    int max_stack_ = 0;
};

}  // namespace qpf

#endif
