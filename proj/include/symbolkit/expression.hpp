#pragma once

// Restricted arithmetic expressions used for state-dependent coefficients.
//
// Grammar (lowest to highest precedence):
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := atom ('^' unary)?            right associative
//   atom    := number | identifier | function '(' args ')' | '(' sum ')'
//
// Identifiers are the state coordinates x1..xd, the jump variable y (only where
// a Levy density is being described) and the constant pi.  Functions: exp, log,
// sin, cos, abs, arctan (one argument) and min, max (two arguments).

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace symbolkit {

enum class ExprOp : std::uint8_t {
    constant,
    variable,       // x_{index+1}
    jump_variable,  // y
    negate,
    add,
    subtract,
    multiply,
    divide,
    power,
    call,
};

enum class ExprFunction : std::uint8_t { exp, log, sin, cos, abs, arctan, min, max };

struct ExprNode {
    ExprOp op = ExprOp::constant;
    double value = 0.0;
    int index = 0;
    ExprFunction function = ExprFunction::exp;
    std::vector<ExprNode> children;

    friend bool operator==(const ExprNode&, const ExprNode&) = default;
};

int function_arity(ExprFunction f);
std::string_view function_name(ExprFunction f);

struct ParseOptions {
    /// Highest admissible coordinate index; negative means unrestricted.
    int dim = -1;
    bool allow_jump_variable = false;
};

/// Immutable expression: an AST plus a compiled postfix program used for evaluation.
class Expression {
public:
    Expression();
    explicit Expression(ExprNode root);

    static Expression constant(double value);

    const ExprNode& root() const { return *root_; }

    /// Evaluates at state x (and jump size y). Throws DomainError outside the domain.
    double evaluate(std::span<const double> x, double y = 0.0) const;

    bool is_constant() const { return !uses_state_ && !uses_jump_; }
    bool depends_on_state() const { return uses_state_; }
    bool depends_on_jump() const { return uses_jump_; }
    /// Number of state coordinates the expression needs (largest referenced index + 1).
    int required_dim() const { return required_dim_; }

    std::string to_string() const;

    friend bool operator==(const Expression& a, const Expression& b) { return *a.root_ == *b.root_; }

private:
    struct Instruction {
        ExprOp op;
        ExprFunction function;
        int index;
        double value;
    };

    void compile();

    std::shared_ptr<const ExprNode> root_;
    std::vector<Instruction> program_;
    std::size_t max_stack_ = 1;
    bool uses_state_ = false;
    bool uses_jump_ = false;
    int required_dim_ = 0;
};

Expression parse_expression(std::string_view text, const ParseOptions& options = {});
std::string print_expression(const Expression& e);

}  // namespace symbolkit
