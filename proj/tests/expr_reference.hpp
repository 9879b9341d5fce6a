#pragma once

// Random expression corpus and a tree-walking reference interpreter, written
// directly against the node structure and the documented domain rules.

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "symbolkit/expression.hpp"

namespace exprref {

using symbolkit::ExprFunction;
using symbolkit::ExprNode;
using symbolkit::ExprOp;

/// nullopt where evaluation is a domain error.
inline std::optional<double> reference_eval(const ExprNode& n, const std::vector<double>& x, double y) {
    auto arg = [&](std::size_t k) { return reference_eval(n.children[k], x, y); };
    switch (n.op) {
        case ExprOp::constant: return n.value;
        case ExprOp::variable: return x.at(static_cast<std::size_t>(n.index));
        case ExprOp::jump_variable: return y;
        case ExprOp::negate: {
            auto a = arg(0);
            if (!a) return std::nullopt;
            return -*a;
        }
        default: break;
    }
    if (n.op == ExprOp::call) {
        auto a = arg(0);
        if (!a) return std::nullopt;
        switch (n.function) {
            case ExprFunction::exp: return std::exp(*a);
            case ExprFunction::log:
                if (!(*a > 0.0)) return std::nullopt;
                return std::log(*a);
            case ExprFunction::sin: return std::sin(*a);
            case ExprFunction::cos: return std::cos(*a);
            case ExprFunction::abs: return std::fabs(*a);
            case ExprFunction::arctan: return std::atan(*a);
            case ExprFunction::min:
            case ExprFunction::max: {
                auto b = arg(1);
                if (!b) return std::nullopt;
                return n.function == ExprFunction::min ? std::fmin(*a, *b) : std::fmax(*a, *b);
            }
        }
        return std::nullopt;
    }
    auto a = arg(0);
    auto b = arg(1);
    if (!a || !b) return std::nullopt;
    switch (n.op) {
        case ExprOp::add: return *a + *b;
        case ExprOp::subtract: return *a - *b;
        case ExprOp::multiply: return *a * *b;
        case ExprOp::divide:
            if (*b == 0.0) return std::nullopt;
            return *a / *b;
        case ExprOp::power: {
            if (*a == 0.0 && *b < 0.0) return std::nullopt;
            const double r = std::pow(*a, *b);
            if (std::isnan(r) && !std::isnan(*a) && !std::isnan(*b)) return std::nullopt;
            return r;
        }
        default: return std::nullopt;
    }
}

/// Random parser-reachable tree: nonnegative constants, x1..x_dim, all operators and functions.
class Generator {
public:
    Generator(std::uint64_t seed, int dim) : rng_(seed), dim_(dim) {}

    ExprNode tree(int depth) {
        std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 9);
        const int k = pick(rng_);
        ExprNode n;
        switch (k) {
            case 0: {
                n.op = ExprOp::constant;
                n.value = constant();
                return n;
            }
            case 1: {
                n.op = ExprOp::variable;
                n.index = std::uniform_int_distribution<int>(0, dim_ - 1)(rng_);
                return n;
            }
            case 2:
                n.op = ExprOp::negate;
                n.children.push_back(tree(depth - 1));
                return n;
            case 3: n.op = ExprOp::add; break;
            case 4: n.op = ExprOp::subtract; break;
            case 5: n.op = ExprOp::multiply; break;
            case 6: n.op = ExprOp::divide; break;
            case 7: {
                n.op = ExprOp::power;
                n.children.push_back(tree(depth - 1));
                // Small exponents keep values finite.
                ExprNode e;
                e.op = ExprOp::constant;
                e.value = std::uniform_int_distribution<int>(0, 3)(rng_);
                if (coin()) {
                    ExprNode neg;
                    neg.op = ExprOp::negate;
                    neg.children.push_back(e);
                    n.children.push_back(neg);
                } else {
                    n.children.push_back(coin() ? e : tree(0));
                }
                return n;
            }
            default: {
                n.op = ExprOp::call;
                const int f = std::uniform_int_distribution<int>(0, 7)(rng_);
                n.function = static_cast<ExprFunction>(f);
                n.children.push_back(tree(depth - 1));
                if (symbolkit::function_arity(n.function) == 2) n.children.push_back(tree(depth - 1));
                return n;
            }
        }
        n.children.push_back(tree(depth - 1));
        n.children.push_back(tree(depth - 1));
        return n;
    }

    std::vector<double> point() {
        std::uniform_real_distribution<double> u(-3.0, 3.0);
        std::vector<double> x(static_cast<std::size_t>(dim_));
        for (double& v : x) v = u(rng_);
        return x;
    }

private:
    bool coin() { return std::uniform_int_distribution<int>(0, 1)(rng_) == 1; }

    double constant() {
        switch (std::uniform_int_distribution<int>(0, 3)(rng_)) {
            case 0: return std::uniform_int_distribution<int>(0, 12)(rng_);
            case 1: return std::uniform_real_distribution<double>(0.0, 10.0)(rng_);
            case 2: return std::ldexp(std::uniform_real_distribution<double>(1.0, 2.0)(rng_),
                                      std::uniform_int_distribution<int>(-30, 30)(rng_));
            default: return std::uniform_int_distribution<int>(1, 99)(rng_) / 100.0;
        }
    }

    std::mt19937_64 rng_;
    int dim_;
};

}  // namespace exprref
