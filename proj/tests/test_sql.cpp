#include "support.hpp"

#include <gtest/gtest.h>

using namespace lukq;

namespace {

ColumnBinding example_binding() { return ColumnBinding("auto", {{"X1", "length"}, {"X5", "seats"}, {"X7", "horsepower"}}); }

ColumnBinding xy() { return ColumnBinding("t", {{"x", "x"}, {"y", "y"}}); }

}  // namespace

TEST(Sql, GoldenSelect) {
    std::string sql = transpile_select(parse("X1 and (X5 or X7)"), example_binding(),
                                       {"id", "trim", "length", "seats", "horsepower"}, false);
    EXPECT_EQ(sql,
              "SELECT id, trim, length, seats, horsepower, least(length,greatest(seats,horsepower)) As Results "
              "FROM auto;");
}

TEST(Sql, MinimalAndOrdered) {
    EXPECT_EQ(transpile_select(parse("X1"), example_binding(), {}, false), "SELECT length As Results FROM auto;");
    EXPECT_EQ(transpile_select(parse("X1"), example_binding(), {}, true),
              "SELECT length As Results FROM auto ORDER BY Results DESC;");
    EXPECT_THROW(transpile_select(parse("X1"), example_binding(), {"bad col"}, false), std::invalid_argument);
}

TEST(Sql, Templates) {
    auto t = [](const char* q) { return transpile_expr(parse(q), xy()); };
    EXPECT_EQ(t("!x"), "1 - (x)");
    EXPECT_EQ(t("x -> y"), "least(1,1-(x - y))");
    EXPECT_EQ(t("x or y"), "greatest(x,y)");
    EXPECT_EQ(t("x and y"), "least(x,y)");
    EXPECT_EQ(t("x <-> y"), "1-ABS(x-y)");
    EXPECT_EQ(t("x + y"), "least(1,x+y)");
    EXPECT_EQ(t("x ox y"), "greatest(0,x+y-1)");
    EXPECT_EQ(t("x - y"), "greatest(0,x-y)");
    EXPECT_EQ(t("x^3"), "greatest(0,3*x-3+1)");
    EXPECT_EQ(t("4*x"), "least(1,4*x)");
    EXPECT_EQ(t("(0.875<=x)"), "(CASE WHEN x >= (7/8) THEN 1 ELSE 0 END)");
    EXPECT_EQ(t("(0.25<=x)"), "(CASE WHEN x >= (1/4) THEN 1 ELSE 0 END)");
    EXPECT_EQ(t("(x<=0.3)"), "(CASE WHEN x <= 0.3 THEN 1 ELSE 0 END)");
    EXPECT_EQ(t("(x<=1/3)"), "(CASE WHEN x <= (1/3) THEN 1 ELSE 0 END)");
    EXPECT_EQ(t("0 or 1"), "greatest(0,1)");
}

TEST(Sql, BareDifferencesAreGuarded) {
    auto t = [](const char* q) { return transpile_expr(parse(q), xy()); };
    EXPECT_EQ(t("x - !y"), "greatest(0,x-(1 - (y)))");
    EXPECT_EQ(t("2*(!x)"), "least(1,2*(1 - (x)))");
    EXPECT_EQ(t("(!x)^2"), "greatest(0,2*(1 - (x))-2+1)");
    EXPECT_EQ(t("!x and y"), "least(1 - (x),y)");
}

TEST(Sql, UnknownVariable) { EXPECT_THROW(transpile_expr(parse("x and z"), xy()), UnboundVariable); }

TEST(Sql, BindingValidation) {
    EXPECT_THROW(ColumnBinding("drop table", {}), std::invalid_argument);
    EXPECT_THROW(ColumnBinding("t", {{"x", "a;b"}}), std::invalid_argument);
}

TEST(ReferenceEval, Grammar) {
    std::map<std::string, Rational> row{{"a", Rational(1, 4)}, {"b", Rational(3, 4)}};
    EXPECT_EQ(reference_sql_eval("least(1,1-(a - b))", row), 1);
    EXPECT_EQ(reference_sql_eval("GREATEST(a,b,0.9)", row), Rational(9, 10));
    EXPECT_EQ(reference_sql_eval("1-ABS(a-b)", row), Rational(1, 2));
    EXPECT_EQ(reference_sql_eval("(1/3) * 3", row), 1);
    EXPECT_EQ(reference_sql_eval("-a + 1", row), Rational(3, 4));
    EXPECT_EQ(reference_sql_eval("(CASE WHEN a >= 0.25 THEN 1 ELSE 0 END)", row), 1);
    EXPECT_EQ(reference_sql_eval("case when b <= 0.5 then 1 else 0 end", row), 0);
    EXPECT_THROW(reference_sql_eval("least(a", row), UnsupportedSqlConstruct);
    EXPECT_THROW(reference_sql_eval("pow(a,2)", row), UnsupportedSqlConstruct);
    EXPECT_THROW(reference_sql_eval("a b", row), UnsupportedSqlConstruct);
    EXPECT_THROW(reference_sql_eval("c", row), UnknownColumn);
}

TEST(ReferenceEval, AgreesWithEval) {
    lukq::testing::Rng rng(51);
    lukq::testing::GenOptions opt;
    opt.crisp = true;
    std::map<std::string, std::string> cols;
    for (const auto& v : opt.vars) cols[v] = "c_" + v;
    ColumnBinding binding("t", cols);
    for (int i = 0; i < 2000; ++i) {
        Formula f = lukq::testing::random_formula(rng, opt);
        Assignment w = lukq::testing::random_world(rng, opt.vars);
        std::map<std::string, Rational> row;
        for (const auto& [v, d] : w) row["c_" + v] = d.value();
        std::string sql = transpile_expr(f, binding);
        ASSERT_EQ(reference_sql_eval(sql, row), eval(f, w).value()) << format(f) << "\n" << sql;
    }
}
