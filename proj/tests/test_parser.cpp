#include "support.hpp"

#include <gtest/gtest.h>

using namespace lukq;

namespace {

SourceSpan span_of(std::string_view text) {
    try {
        parse(text);
    } catch (const SyntaxError& e) {
        return e.span();
    }
    ADD_FAILURE() << "expected a syntax error for: " << text;
    return {};
}

}  // namespace

TEST(Parser, CaseStudyQueries) {
    const char* queries[] = {
        "X1 and (X5 or !X7)",
        "(0.875<=X11) and (X12<=0.25)",
        "X11^8 and (!X12)^4",
        "20(X11^8 and (!X12)^4)",
        "X11^2 and (!X12)",
        "(0.87<=X11)",
        "(0.88<=X11)",
        "X11^2 and (!X12) and (!X0)^3",
        "X11^2 and (!X12) and (!X0)^3 and (!X6)^2",
        "2*(X11^2 and (!X12) and (!X0)^3 and (!X6)^2)",
        "X11 and 2*(!X12) and (!X0)^2 and (!X6)",
        "(X11^2 and (!X12)) - (X0)",
        "2*((X11^2 and (!X12)) - (X0))",
        "X11^2 and (!X12) and (!X0)",
    };
    for (const char* q : queries) EXPECT_NO_THROW(parse(q)) << q;
}

TEST(Parser, Shapes) {
    Formula a = var("a"), b = var("b"), c = var("c");
    EXPECT_EQ(parse("a and (b or !c)"), land(a, lor(b, neg(c))));
    EXPECT_EQ(parse("20(a^8 and (!b)^4)"), iter_sum(20, land(iter_prod(8, a), iter_prod(4, neg(b)))));
    EXPECT_EQ(parse("2*a"), iter_sum(2, a));
    EXPECT_EQ(parse("2a"), iter_sum(2, a));
    EXPECT_EQ(parse("a^2^3"), iter_prod(3, iter_prod(2, a)));
    EXPECT_EQ(parse("!a^2"), neg(iter_prod(2, a)));
    EXPECT_EQ(parse("(0.875<=a)"), crisp_geq(Rational(7, 8), "a"));
    EXPECT_EQ(parse("(a<=1/4)"), crisp_leq(Rational(1, 4), "a"));
    EXPECT_EQ(parse("0 -> 1"), impl(falsum(), verum()));
}

TEST(Parser, PrecedenceAndAssociativity) {
    Formula a = var("a"), b = var("b"), c = var("c");
    EXPECT_EQ(parse("a -> b -> c"), impl(a, impl(b, c)));
    EXPECT_EQ(parse("a - b - c"), ominus(ominus(a, b), c));
    EXPECT_EQ(parse("a + b - c"), oplus(a, ominus(b, c)));
    EXPECT_EQ(parse("a ox b - c"), ominus(odot(a, b), c));
    EXPECT_EQ(parse("a or b and c"), lor(a, land(b, c)));
    EXPECT_EQ(parse("a and b + c"), land(a, oplus(b, c)));
    EXPECT_EQ(parse("a or b -> c"), impl(lor(a, b), c));
    EXPECT_EQ(parse("a -> b <-> c"), iff(impl(a, b), c));
    EXPECT_EQ(parse("a AND b"), land(a, b));
    EXPECT_EQ(parse("a Ox b"), odot(a, b));
}

TEST(Parser, Errors) {
    EXPECT_THROW(parse("a <-> b <-> c"), SyntaxError);
    EXPECT_THROW(parse("X11 and"), SyntaxError);
    EXPECT_THROW(parse("(1.5<=X)"), SyntaxError);
    EXPECT_THROW(parse("5"), SyntaxError);
    EXPECT_THROW(parse("a^0"), SyntaxError);
    EXPECT_THROW(parse("a $ b"), SyntaxError);
    EXPECT_THROW(parse("(a"), SyntaxError);
    EXPECT_THROW(parse(""), SyntaxError);
    EXPECT_THROW(parse("and"), SyntaxError);
}

TEST(Parser, ErrorSpans) {
    SourceSpan s = span_of("X11 ox ox");
    EXPECT_EQ(s.start, 7u);
    EXPECT_EQ(s.end, 9u);
    s = span_of("X11 and");
    EXPECT_EQ(s.start, 7u);
    s = span_of("(2<=X)");
    EXPECT_EQ(s.start, 1u);
    EXPECT_EQ(s.end, 2u);
}

TEST(Formatter, CanonicalText) {
    EXPECT_EQ(format(parse("20(X11^8 and (!X12)^4)")), "20*(X11^8 and (!X12)^4)");
    EXPECT_EQ(format(parse("a -> (b -> c)")), "a -> b -> c");
    EXPECT_EQ(format(parse("(a -> b) -> c")), "(a -> b) -> c");
    EXPECT_EQ(format(parse("(a - b) - c")), "a - b - c");
    EXPECT_EQ(format(parse("a - (b - c)")), "a - (b - c)");
    EXPECT_EQ(format(parse("(a<=1/3)")), "(a<=1/3)");
}

TEST(Formatter, RoundTripRandom) {
    lukq::testing::Rng rng(21);
    lukq::testing::GenOptions opt;
    opt.crisp = true;
    for (int i = 0; i < 3000; ++i) {
        Formula f = lukq::testing::random_formula(rng, opt);
        std::string text = format(f);
        ASSERT_EQ(parse(text), f) << text;
    }
}
