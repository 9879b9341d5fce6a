#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "expr_reference.hpp"
#include "symbolkit/errors.hpp"
#include "symbolkit/expression.hpp"

using namespace symbolkit;

namespace {

double eval(const std::string& text, std::vector<double> x = {}, double y = 0.0) {
    ParseOptions opt;
    opt.allow_jump_variable = true;
    return parse_expression(text, opt).evaluate(x, y);
}

}  // namespace

TEST(Expression, RationalCoefficient) { EXPECT_DOUBLE_EQ(eval("0.3 + 0.4/(1+x1^2)", {0.0}), 0.7); }

TEST(Expression, FunctionsOfTwoCoordinates) {
    EXPECT_DOUBLE_EQ(eval("abs(x1)*sin(x2)", {2.0, std::numbers::pi / 2}), 2.0);
}

TEST(Expression, TrailingOperatorReportsOffset) {
    try {
        parse_expression("1 +");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.offset(), 3u);
    }
}

TEST(Expression, UnknownIdentifier) {
    EXPECT_THROW(parse_expression("foo(x1)"), ParseError);
    EXPECT_THROW(parse_expression("z + 1"), ParseError);
    EXPECT_THROW(parse_expression("x0"), ParseError);
    EXPECT_THROW(parse_expression("x01"), ParseError);
}

TEST(Expression, Precedence) {
    EXPECT_DOUBLE_EQ(eval("-2^2"), -4.0);
    EXPECT_DOUBLE_EQ(eval("2^3^2"), 512.0);
    EXPECT_DOUBLE_EQ(eval("8/4/2"), 1.0);
    EXPECT_DOUBLE_EQ(eval("10-4-3"), 3.0);
    EXPECT_DOUBLE_EQ(eval("2*3+4*5"), 26.0);
    EXPECT_DOUBLE_EQ(eval("2^-1"), 0.5);
    EXPECT_DOUBLE_EQ(eval("--3"), 3.0);
    EXPECT_DOUBLE_EQ(eval("min(3, max(1, 2))"), 2.0);
    EXPECT_DOUBLE_EQ(eval("2*pi"), 2.0 * std::numbers::pi);
    EXPECT_DOUBLE_EQ(eval("1.5e2"), 150.0);
}

TEST(Expression, DomainErrors) {
    EXPECT_THROW(eval("1/x1", {0.0}), DomainError);
    EXPECT_THROW(eval("log(x1)", {-1.0}), DomainError);
    EXPECT_THROW(eval("log(0)"), DomainError);
    EXPECT_THROW(eval("0^-1"), DomainError);
    EXPECT_THROW(eval("(-2)^0.5"), DomainError);
    EXPECT_DOUBLE_EQ(eval("(-2)^3"), -8.0);
}

TEST(Expression, DimensionAndJumpVariable) {
    ParseOptions opt;
    opt.dim = 1;
    EXPECT_THROW(parse_expression("x2", opt), ParseError);
    EXPECT_NO_THROW(parse_expression("x1", opt));
    EXPECT_THROW(parse_expression("y"), ParseError);
    EXPECT_EQ(parse_expression("x3 + 1").required_dim(), 3);
    EXPECT_TRUE(parse_expression("2*pi").is_constant());
    EXPECT_TRUE(parse_expression("x1").depends_on_state());
}

TEST(Expression, WrongArity) {
    EXPECT_THROW(parse_expression("min(1)"), ParseError);
    EXPECT_THROW(parse_expression("sin(1, 2)"), ParseError);
    EXPECT_THROW(parse_expression("(1"), ParseError);
    EXPECT_THROW(parse_expression(""), ParseError);
}

TEST(Expression, PrintsMinimalParentheses) {
    EXPECT_EQ(print_expression(parse_expression("(x1+1)*2")), "(x1+1)*2");
    EXPECT_EQ(print_expression(parse_expression("x1-(x2-1)")), "x1-(x2-1)");
    EXPECT_EQ(print_expression(parse_expression("(x1^2)^3")), "(x1^2)^3");
    EXPECT_EQ(print_expression(parse_expression("x1^2^3")), "x1^2^3");
    EXPECT_EQ(print_expression(parse_expression("(-x1)^2")), "(-x1)^2");
}

TEST(Expression, CorpusRoundTripAndReferenceEvaluation) {
    exprref::Generator gen(20240611, 3);
    int evaluated = 0;
    for (int i = 0; i < 500; ++i) {
        const ExprNode tree = gen.tree(5);
        const Expression e(tree);
        const std::string text = print_expression(e);
        const Expression back = parse_expression(text);
        ASSERT_EQ(back, e) << text;

        const std::vector<double> x = gen.point();
        const auto want = exprref::reference_eval(tree, x, 0.0);
        if (!want) {
            EXPECT_THROW(e.evaluate(x), DomainError) << text;
            continue;
        }
        ++evaluated;
        const double got = e.evaluate(x);
        if (std::isnan(*want)) {
            EXPECT_TRUE(std::isnan(got)) << text;
        } else if (std::isinf(*want)) {
            EXPECT_EQ(got, *want) << text;
        } else {
            EXPECT_LE(std::abs(got - *want), 1e-14 * std::max(1.0, std::abs(*want))) << text;
        }
    }
    EXPECT_GT(evaluated, 350);
}
