#include "symbolkit/expression.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

#include "symbolkit/errors.hpp"

namespace symbolkit {

int function_arity(ExprFunction f) {
    return (f == ExprFunction::min || f == ExprFunction::max) ? 2 : 1;
}

std::string_view function_name(ExprFunction f) {
    switch (f) {
        case ExprFunction::exp: return "exp";
        case ExprFunction::log: return "log";
        case ExprFunction::sin: return "sin";
        case ExprFunction::cos: return "cos";
        case ExprFunction::abs: return "abs";
        case ExprFunction::arctan: return "arctan";
        case ExprFunction::min: return "min";
        case ExprFunction::max: return "max";
    }
    return "?";
}

namespace {

constexpr std::array<ExprFunction, 8> kFunctions = {
    ExprFunction::exp, ExprFunction::log, ExprFunction::sin,    ExprFunction::cos,
    ExprFunction::abs, ExprFunction::arctan, ExprFunction::min, ExprFunction::max};

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

class Parser {
public:
    Parser(std::string_view text, const ParseOptions& options) : text_(text), options_(options) {}

    ExprNode parse() {
        ExprNode e = parse_sum();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, pos_); }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= text_.size()) fail(std::string("expected '") + c + "' but reached end of input");
            fail(std::string("expected '") + c + "'");
        }
    }

    static ExprNode binary(ExprOp op, ExprNode lhs, ExprNode rhs) {
        ExprNode n;
        n.op = op;
        n.children.reserve(2);
        n.children.push_back(std::move(lhs));
        n.children.push_back(std::move(rhs));
        return n;
    }

    ExprNode parse_sum() {
        ExprNode lhs = parse_product();
        for (;;) {
            if (accept('+')) {
                lhs = binary(ExprOp::add, std::move(lhs), parse_product());
            } else if (accept('-')) {
                lhs = binary(ExprOp::subtract, std::move(lhs), parse_product());
            } else {
                return lhs;
            }
        }
    }

    ExprNode parse_product() {
        ExprNode lhs = parse_unary();
        for (;;) {
            if (accept('*')) {
                lhs = binary(ExprOp::multiply, std::move(lhs), parse_unary());
            } else if (accept('/')) {
                lhs = binary(ExprOp::divide, std::move(lhs), parse_unary());
            } else {
                return lhs;
            }
        }
    }

    ExprNode parse_unary() {
        if (accept('-')) {
            ExprNode n;
            n.op = ExprOp::negate;
            n.children.push_back(parse_unary());
            return n;
        }
        return parse_power();
    }

    ExprNode parse_power() {
        ExprNode base = parse_atom();
        if (accept('^')) return binary(ExprOp::power, std::move(base), parse_unary());
        return base;
    }

    ExprNode parse_atom() {
        skip_space();
        if (pos_ >= text_.size()) fail("expected an operand but reached end of input");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            ExprNode inner = parse_sum();
            expect(')');
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        fail("unexpected character '" + std::string(1, c) + "'");
    }

    ExprNode parse_number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
            ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
            if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
                while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) ++p;
                pos_ = p;
            }
        }
        double value = 0.0;
        const char* first = text_.data() + start;
        const char* last = text_.data() + pos_;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr != last) {
            pos_ = start;
            fail("malformed number");
        }
        ExprNode n;
        n.op = ExprOp::constant;
        n.value = value;
        return n;
    }

    ExprNode parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string_view name = text_.substr(start, pos_ - start);

        for (ExprFunction f : kFunctions) {
            if (name == function_name(f)) {
                ExprNode n;
                n.op = ExprOp::call;
                n.function = f;
                expect('(');
                const int arity = function_arity(f);
                for (int k = 0; k < arity; ++k) {
                    if (k > 0) expect(',');
                    n.children.push_back(parse_sum());
                }
                expect(')');
                return n;
            }
        }
        if (name == "pi") {
            ExprNode n;
            n.op = ExprOp::constant;
            n.value = std::numbers::pi;
            return n;
        }
        if (name == "y") {
            if (!options_.allow_jump_variable) {
                pos_ = start;
                fail("unknown identifier 'y' (the jump variable is only allowed in Levy densities)");
            }
            ExprNode n;
            n.op = ExprOp::jump_variable;
            return n;
        }
        if (name.size() >= 2 && name[0] == 'x' &&
            std::all_of(name.begin() + 1, name.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }) &&
            name[1] != '0') {
            int k = 0;
            std::from_chars(name.data() + 1, name.data() + name.size(), k);
            if (options_.dim >= 0 && k > options_.dim) {
                pos_ = start;
                fail("unknown identifier '" + std::string(name) + "' (model dimension is " +
                     std::to_string(options_.dim) + ")");
            }
            ExprNode n;
            n.op = ExprOp::variable;
            n.index = k - 1;
            return n;
        }
        pos_ = start;
        fail("unknown identifier '" + std::string(name) + "'");
    }

    std::string_view text_;
    ParseOptions options_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

int precedence(const ExprNode& n) {
    switch (n.op) {
        case ExprOp::add:
        case ExprOp::subtract: return 1;
        case ExprOp::multiply:
        case ExprOp::divide: return 2;
        case ExprOp::negate: return 3;
        case ExprOp::power: return 4;
        case ExprOp::constant: return n.value < 0.0 || std::signbit(n.value) ? 3 : 5;
        default: return 5;
    }
}

void print_number(std::string& out, double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    out.append(buf.data(), ptr);
}

void print_node(std::string& out, const ExprNode& n);

void print_child(std::string& out, const ExprNode& child, int min_precedence) {
    if (precedence(child) < min_precedence) {
        out.push_back('(');
        print_node(out, child);
        out.push_back(')');
    } else {
        print_node(out, child);
    }
}

void print_node(std::string& out, const ExprNode& n) {
    switch (n.op) {
        case ExprOp::constant: print_number(out, n.value); return;
        case ExprOp::variable:
            out.push_back('x');
            out += std::to_string(n.index + 1);
            return;
        case ExprOp::jump_variable: out.push_back('y'); return;
        case ExprOp::negate:
            out.push_back('-');
            print_child(out, n.children[0], 3);
            return;
        case ExprOp::add:
        case ExprOp::subtract:
            print_child(out, n.children[0], 1);
            out.push_back(n.op == ExprOp::add ? '+' : '-');
            print_child(out, n.children[1], 2);
            return;
        case ExprOp::multiply:
        case ExprOp::divide:
            print_child(out, n.children[0], 2);
            out.push_back(n.op == ExprOp::multiply ? '*' : '/');
            print_child(out, n.children[1], 3);
            return;
        case ExprOp::power:
            print_child(out, n.children[0], 5);
            out.push_back('^');
            print_child(out, n.children[1], 3);
            return;
        case ExprOp::call:
            out += function_name(n.function);
            out.push_back('(');
            for (std::size_t k = 0; k < n.children.size(); ++k) {
                if (k > 0) out.push_back(',');
                print_node(out, n.children[k]);
            }
            out.push_back(')');
            return;
    }
}

double checked_log(double v) {
    if (!(v > 0.0)) throw DomainError("log of nonpositive value " + std::to_string(v));
    return std::log(v);
}

double checked_divide(double a, double b) {
    if (b == 0.0) throw DomainError("division by zero");
    return a / b;
}

double checked_power(double a, double b) {
    if (a == 0.0 && b < 0.0) throw DomainError("zero raised to a negative power");
    const double r = std::pow(a, b);
    if (std::isnan(r) && !std::isnan(a) && !std::isnan(b))
        throw DomainError("negative base " + std::to_string(a) + " raised to non-integer power");
    return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Expression
// ---------------------------------------------------------------------------

Expression::Expression() : Expression(ExprNode{}) {}

Expression::Expression(ExprNode root) : root_(std::make_shared<const ExprNode>(std::move(root))) { compile(); }

Expression Expression::constant(double value) {
    ExprNode n;
    n.op = ExprOp::constant;
    n.value = value;
    return Expression(std::move(n));
}

void Expression::compile() {
    program_.clear();
    std::size_t depth = 0;
    max_stack_ = 1;
    // Post-order emission; stack depth tracked to size the evaluation buffer.
    auto emit = [&](auto&& self, const ExprNode& n) -> void {
        for (const ExprNode& c : n.children) self(self, c);
        program_.push_back(Instruction{n.op, n.function, n.index, n.value});
        switch (n.op) {
            case ExprOp::constant:
            case ExprOp::variable:
            case ExprOp::jump_variable: ++depth; break;
            case ExprOp::negate: break;
            case ExprOp::call: depth -= n.children.size() - 1; break;
            default: --depth; break;
        }
        if (n.op == ExprOp::variable) {
            uses_state_ = true;
            required_dim_ = std::max(required_dim_, n.index + 1);
        }
        if (n.op == ExprOp::jump_variable) uses_jump_ = true;
        max_stack_ = std::max(max_stack_, depth);
    };
    emit(emit, *root_);
}

double Expression::evaluate(std::span<const double> x, double y) const {
    if (static_cast<int>(x.size()) < required_dim_)
        throw DomainError("expression needs " + std::to_string(required_dim_) + " coordinates, got " +
                          std::to_string(x.size()));
    constexpr std::size_t kInline = 32;
    std::array<double, kInline> inline_stack{};
    std::vector<double> heap_stack;
    double* stack = inline_stack.data();
    if (max_stack_ > kInline) {
        heap_stack.resize(max_stack_);
        stack = heap_stack.data();
    }
    std::size_t top = 0;
    for (const Instruction& ins : program_) {
        switch (ins.op) {
            case ExprOp::constant: stack[top++] = ins.value; break;
            case ExprOp::variable: stack[top++] = x[static_cast<std::size_t>(ins.index)]; break;
            case ExprOp::jump_variable: stack[top++] = y; break;
            case ExprOp::negate: stack[top - 1] = -stack[top - 1]; break;
            case ExprOp::add: --top; stack[top - 1] += stack[top]; break;
            case ExprOp::subtract: --top; stack[top - 1] -= stack[top]; break;
            case ExprOp::multiply: --top; stack[top - 1] *= stack[top]; break;
            case ExprOp::divide: --top; stack[top - 1] = checked_divide(stack[top - 1], stack[top]); break;
            case ExprOp::power: --top; stack[top - 1] = checked_power(stack[top - 1], stack[top]); break;
            case ExprOp::call: {
                double& a = stack[top - function_arity(ins.function)];
                switch (ins.function) {
                    case ExprFunction::exp: a = std::exp(a); break;
                    case ExprFunction::log: a = checked_log(a); break;
                    case ExprFunction::sin: a = std::sin(a); break;
                    case ExprFunction::cos: a = std::cos(a); break;
                    case ExprFunction::abs: a = std::abs(a); break;
                    case ExprFunction::arctan: a = std::atan(a); break;
                    case ExprFunction::min: a = std::min(a, stack[top - 1]); --top; break;
                    case ExprFunction::max: a = std::max(a, stack[top - 1]); --top; break;
                }
                break;
            }
        }
    }
    return stack[0];
}

std::string Expression::to_string() const { return print_expression(*this); }

Expression parse_expression(std::string_view text, const ParseOptions& options) {
    return Expression(Parser(text, options).parse());
}

std::string print_expression(const Expression& e) {
    std::string out;
    print_node(out, e.root());
    return out;
}

}  // namespace symbolkit
