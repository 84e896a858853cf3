// Formula → SQL expression text, plus an exact evaluator for that text.
//
// Each connective maps to one fixed template:
//
//   ¬α      1 - (α)                  α ⊕ β   least(1,α+β)
//   α → β   least(1,1-(α - β))       α ⊙ β   greatest(0,α+β-1)
//   α ∨ β   greatest(α,β)            α ⊖ β   greatest(0,α-β)
//   α ∧ β   least(α,β)               α^n     greatest(0,n*α-n+1)
//   α ↔ β   1-ABS(α-β)               nα      least(1,n*α)
//
// Iterated connectives use the n-templates, so output length is linear in
// the node count regardless of n.  Sub-expressions are substituted
// textually; the two templates that are bare differences (¬, ↔) get
// parenthesised when they land right of a minus or after `n*`, where
// textual substitution would otherwise change the arithmetic.
//
// The SQL reads columns holding normalised degrees.
#pragma once

#include "lukq/formula.hpp"

#include <cctype>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace lukq {

class UnsupportedSqlConstruct : public Error {
public:
    UnsupportedSqlConstruct(std::size_t offset, const std::string& what)
        : Error("unsupported SQL at offset " + std::to_string(offset) + ": " + what) {}
};

class UnknownColumn : public Error {
public:
    explicit UnknownColumn(const std::string& name) : Error("unknown column '" + name + "'") {}
};

/// Variable → SQL column, plus the table the columns live in.
class ColumnBinding {
public:
    ColumnBinding(std::string table, std::map<std::string, std::string> columns)
        : table_(std::move(table)), columns_(std::move(columns)) {
        if (!is_identifier(table_)) throw std::invalid_argument("invalid SQL table name '" + table_ + "'");
        for (const auto& [v, c] : columns_)
            if (!is_identifier(c)) throw std::invalid_argument("invalid SQL column name '" + c + "'");
    }

    const std::string& table() const noexcept { return table_; }
    const std::map<std::string, std::string>& columns() const noexcept { return columns_; }

    const std::string& column(const std::string& variable) const {
        auto it = columns_.find(variable);
        if (it == columns_.end()) throw UnboundVariable(variable);
        return it->second;
    }

private:
    std::string table_;
    std::map<std::string, std::string> columns_;
};

namespace detail {

inline bool is_power_of_ten(Integer d) {
    while (d % 10 == 0) d /= 10;
    return d == 1;
}

/// Decimal when the reduced denominator is a power of ten, else `(p/q)`.
inline std::string sql_numeral(const Rational& r) {
    if (is_power_of_ten(denominator(r))) return to_exact_decimal(r);
    return "(" + to_fraction(r) + ")";
}

struct SqlPiece {
    std::string text;
    bool bare_difference = false;  // top level is `a - b` / `a-b`, unparenthesised
};

inline std::string guarded(const SqlPiece& p) { return p.bare_difference ? "(" + p.text + ")" : p.text; }

inline SqlPiece transpile_piece(const Formula& f, const ColumnBinding& b) {
    switch (f.kind()) {
        case Formula::Kind::Var: return {b.column(f.var_name())};
        case Formula::Kind::Falsum: return {"0"};
        case Formula::Kind::Verum: return {"1"};
        case Formula::Kind::Neg: return {"1 - (" + transpile_piece(f.child(), b).text + ")", true};
        case Formula::Kind::Binary: {
            SqlPiece a = transpile_piece(f.lhs(), b);
            SqlPiece c = transpile_piece(f.rhs(), b);
            switch (f.binary_op()) {
                case BinaryOp::Impl: return {"least(1,1-(" + a.text + " - " + guarded(c) + "))"};
                case BinaryOp::Or: return {"greatest(" + a.text + "," + c.text + ")"};
                case BinaryOp::And: return {"least(" + a.text + "," + c.text + ")"};
                case BinaryOp::Iff: return {"1-ABS(" + a.text + "-" + guarded(c) + ")", true};
                case BinaryOp::Oplus: return {"least(1," + a.text + "+" + c.text + ")"};
                case BinaryOp::Odot: return {"greatest(0," + a.text + "+" + c.text + "-1)"};
                case BinaryOp::Ominus: return {"greatest(0," + a.text + "-" + guarded(c) + ")"};
            }
            break;
        }
        case Formula::Kind::Iterated: {
            std::string n = std::to_string(f.count());
            std::string a = guarded(transpile_piece(f.child(), b));
            if (f.iter_op() == IterOp::Sum) return {"least(1," + n + "*" + a + ")"};
            return {"greatest(0," + n + "*" + a + "-" + n + "+1)"};
        }
        case Formula::Kind::CrispCmp: {
            const auto& c = f.crisp();
            const char* op = c.direction == CmpDirection::Geq ? " >= " : " <= ";
            return {"(CASE WHEN " + b.column(c.var) + op + sql_numeral(c.threshold) + " THEN 1 ELSE 0 END)"};
        }
    }
    throw std::logic_error("unknown formula kind");
}

}  // namespace detail

/// SQL expression computing the degree of `f` per row.
inline std::string transpile_expr(const Formula& f, const ColumnBinding& binding) {
    return detail::transpile_piece(f, binding).text;
}

/// `SELECT <projected>, <expr> As Results FROM <table>[ ORDER BY Results DESC];`
inline std::string transpile_select(const Formula& f, const ColumnBinding& binding,
                                    const std::vector<std::string>& projected, bool order) {
    std::string sql = "SELECT ";
    for (const auto& p : projected) {
        if (!is_identifier(p)) throw std::invalid_argument("invalid SQL column name '" + p + "'");
        sql += p;
        sql += ", ";
    }
    sql += transpile_expr(f, binding);
    sql += " As Results FROM ";
    sql += binding.table();
    if (order) sql += " ORDER BY Results DESC";
    sql += ';';
    return sql;
}

// ── Reference evaluator ─────────────────────────────────────────────────────

namespace detail {

class SqlEvaluator {
public:
    SqlEvaluator(std::string_view src, const std::map<std::string, Rational>& row) : src_(src), row_(row) {}

    Rational run() {
        Rational v = expr();
        skip_ws();
        if (pos_ != src_.size()) fail("trailing input");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& what) const { throw UnsupportedSqlConstruct(pos_, what); }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!eat(c)) fail(std::string("expected '") + c + "'");
    }
    std::string word() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
        return std::string(src_.substr(start, pos_ - start));
    }
    static std::string upper(std::string s) {
        for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        return s;
    }
    void keyword(const char* kw) {
        std::size_t at = pos_;
        if (upper(word()) != kw) {
            pos_ = at;
            fail(std::string("expected ") + kw);
        }
    }

    Rational expr() {
        Rational v = term();
        for (;;) {
            if (eat('+'))
                v += term();
            else if (eat('-'))
                v -= term();
            else
                return v;
        }
    }

    Rational term() {
        Rational v = factor();
        for (;;) {
            if (eat('*')) {
                v *= factor();
            } else if (eat('/')) {
                Rational d = factor();
                if (d == 0) fail("division by zero");
                v /= d;
            } else {
                return v;
            }
        }
    }

    Rational factor() {
        if (eat('-')) return -factor();
        if (eat('(')) {
            Rational v = expr();
            expect(')');
            return v;
        }
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end");
        char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) ++pos_;
            try {
                return parse_rational(src_.substr(start, pos_ - start));
            } catch (const NumberFormatError&) {
                pos_ = start;
                fail("malformed number");
            }
        }
        if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_')) fail(std::string("unexpected '") + c + "'");
        std::size_t at = pos_;
        std::string name = word();
        std::string fn = upper(name);
        if (fn == "CASE") return case_when();
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == '(') {
            ++pos_;
            std::vector<Rational> args{expr()};
            while (eat(',')) args.push_back(expr());
            expect(')');
            if (fn == "LEAST" || fn == "GREATEST") {
                Rational best = args[0];
                for (const auto& a : args)
                    if (fn == "LEAST" ? a < best : best < a) best = a;
                return best;
            }
            if (fn == "ABS") {
                if (args.size() != 1) fail("ABS takes one argument");
                return args[0] < 0 ? Rational(-args[0]) : args[0];
            }
            pos_ = at;
            fail("unknown function " + name);
        }
        auto it = row_.find(name);
        if (it == row_.end()) throw UnknownColumn(name);
        return it->second;
    }

    Rational case_when() {
        keyword("WHEN");
        Rational lhs = expr();
        skip_ws();
        std::string op;
        while (pos_ < src_.size() && (src_[pos_] == '<' || src_[pos_] == '>' || src_[pos_] == '=')) op += src_[pos_++];
        Rational rhs = expr();
        bool holds;
        if (op == ">=") holds = lhs >= rhs;
        else if (op == "<=") holds = lhs <= rhs;
        else if (op == ">") holds = lhs > rhs;
        else if (op == "<") holds = lhs < rhs;
        else if (op == "=") holds = lhs == rhs;
        else fail("unknown comparison '" + op + "'");
        keyword("THEN");
        Rational then_v = expr();
        keyword("ELSE");
        Rational else_v = expr();
        keyword("END");
        return holds ? then_v : else_v;
    }

    std::string_view src_;
    const std::map<std::string, Rational>& row_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Evaluates the expression grammar transpile_expr emits (least, greatest,
/// ABS, + - * /, numerals, columns, CASE WHEN … END) exactly.
inline Rational reference_sql_eval(std::string_view expr, const std::map<std::string, Rational>& row) {
    return detail::SqlEvaluator(expr, row).run();
}

}  // namespace lukq
